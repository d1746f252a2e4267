"""Budgeted answer-collection planning and captured-diversity scoring.

A plan gives the top-B questions of a ranking R answers each and everyone
else the minimum S. Collection is simulated by sampling without
replacement from each question's stored answer pool; captured diversity
is the number of ground-truth answers (those observed at least twice in
the pool) that the sample hits, summed over questions. The exact mode
replaces sampling with the closed-form expectation: a truth answer
occurring c times in a pool of A is captured by an n-answer draw with
probability 1 - C(A-c, n) / C(A, n).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Mapping, Sequence

import numpy as np

from .answers import normalize_answer
from .corpus import Corpus
from .errors import InvalidBudget, InvalidCounts, KeyMismatch, MissingPrediction

#: Minimum occurrences for an answer to count as ground truth.
TRUTH_MIN_COUNT = 2

#: Cost assumptions attached to sweep output for convenience.
ANSWER_COST_USD = 0.02
SECONDS_PER_ANSWER = 30.0

SIMULATION_MODES = ("exact", "mc")

_SEED_MASK = (1 << 64) - 1


def rank_by_disagreement(
    predictions: Mapping[int, float],
    question_ids: Iterable[int] | None = None,
) -> list[int]:
    """Question ids by descending predicted disagreement, ties by ascending id."""
    if question_ids is not None:
        ids = list(question_ids)
        missing = sorted(set(ids) - predictions.keys())
        if missing:
            raise MissingPrediction(
                f"{len(missing)} questions lack predictions (first: {missing[:5]})"
            )
    else:
        ids = list(predictions)
    return sorted(ids, key=lambda qid: (-predictions[qid], qid))


def status_quo_ranking(question_ids: Iterable[int], seed) -> list[int]:
    """Uniform random priority order, deterministic given the seed."""
    ids = sorted(question_ids)
    rng = np.random.default_rng(seed)
    return [ids[i] for i in rng.permutation(len(ids))]


def oracle_ranking(corpus: Corpus) -> list[int]:
    """Ids by descending true-diversity count, ties by ascending id."""
    truth = truth_sets(corpus)
    return sorted(truth, key=lambda qid: (-len(truth[qid]), qid))


def truth_sets(corpus: Corpus) -> dict[int, frozenset[str]]:
    """Per question: normalized answers observed at least twice in its pool."""
    out = {}
    for vq in corpus:
        counts = Counter(normalize_answer(ans) for ans in vq.raw_answers)
        out[vq.question_id] = frozenset(
            ans for ans, c in counts.items() if c >= TRUTH_MIN_COUNT
        )
    return out


@dataclass(frozen=True)
class AllocationPlan:
    """Per-question answer counts: the ranking's top-B get r, the rest s."""

    assignments: Mapping[int, int]
    budget: int
    s: int
    r: int

    @property
    def answers_spent(self) -> int:
        return sum(self.assignments.values())


def make_plan(ranking: Sequence[int], budget: int, s: int = 1, r: int = 5) -> AllocationPlan:
    n = len(ranking)
    if not 0 <= budget <= n:
        raise InvalidBudget(f"budget must be in [0, {n}], got {budget}")
    if not 1 <= s < r:
        raise InvalidCounts(f"need 1 <= S < R, got S={s}, R={r}")
    assignments = {qid: (r if pos < budget else s) for pos, qid in enumerate(ranking)}
    return AllocationPlan(assignments=assignments, budget=budget, s=s, r=r)


def diversity_score(
    collected: Mapping[int, AbstractSet[str]],
    truth: Mapping[int, AbstractSet[str]],
) -> int:
    """Total ground-truth answers hit: sum over questions of |collected & truth|."""
    if collected.keys() != truth.keys():
        raise KeyMismatch("collected and truth cover different question ids")
    return sum(len(set(collected[qid]) & set(truth[qid])) for qid in truth)


def expected_capture(
    answer_counts: Mapping[str, int],
    truth: AbstractSet[str],
    sample_size: int,
    pool_size: int,
) -> float:
    """Expected truth answers hit by an n-of-A draw without replacement.

    Binomial coefficients are evaluated exactly in integer arithmetic, so
    the result is precise for any pool size.
    """
    total_ways = math.comb(pool_size, sample_size)
    return sum(
        1.0 - math.comb(pool_size - answer_counts[ans], sample_size) / total_ways
        for ans in truth
    )


@dataclass(frozen=True)
class DiversityReport:
    budget: int
    diversity: float
    max_diversity: int
    answers_spent: int
    mode: str
    trials: int | None = None
    seed: int | None = None

    @property
    def diversity_fraction(self) -> float:
        if self.max_diversity == 0:
            return 1.0
        return self.diversity / self.max_diversity


class _AnswerPools:
    """Per-question normalized pools, tallies, and truth sets for one corpus."""

    def __init__(self, corpus: Corpus):
        self.a = corpus.answers_per_question
        self.normalized: dict[int, tuple[str, ...]] = {}
        self.counts: dict[int, Counter] = {}
        self.truth: dict[int, frozenset[str]] = {}
        for vq in corpus:
            pool = tuple(normalize_answer(ans) for ans in vq.raw_answers)
            counts = Counter(pool)
            self.normalized[vq.question_id] = pool
            self.counts[vq.question_id] = counts
            self.truth[vq.question_id] = frozenset(
                ans for ans, c in counts.items() if c >= TRUTH_MIN_COUNT
            )
        self.max_diversity = sum(len(t) for t in self.truth.values())
        self._capture_cache: dict[tuple[int, int], float] = {}

    def capture(self, qid: int, n: int) -> float:
        key = (qid, n)
        if key not in self._capture_cache:
            self._capture_cache[key] = expected_capture(
                self.counts[qid], self.truth[qid], n, self.a
            )
        return self._capture_cache[key]


def simulate_collection(
    plan: AllocationPlan,
    corpus: Corpus,
    mode: str = "exact",
    trials: int = 1000,
    seed: int = 0,
) -> DiversityReport:
    """Score a plan against a corpus's stored answer pools.

    "exact" computes the hypergeometric expectation of captured diversity
    and is deterministic. "mc" draws `trials` random collections; each
    question's stream for a trial is seeded by (seed, question id, trial),
    so results do not depend on evaluation order.
    """
    return _simulate(plan, _AnswerPools(corpus), mode, trials, seed)


def _simulate(
    plan: AllocationPlan,
    pools: _AnswerPools,
    mode: str,
    trials: int,
    seed: int,
) -> DiversityReport:
    if mode not in SIMULATION_MODES:
        raise ValueError(f"mode must be one of {SIMULATION_MODES}, got {mode!r}")
    if plan.assignments.keys() != pools.truth.keys():
        raise KeyMismatch("plan does not cover the same question ids as the corpus")
    if plan.r > pools.a:
        raise InvalidCounts(f"R={plan.r} exceeds the {pools.a} stored answers")

    if mode == "exact":
        # fsum over a canonical order keeps the result independent of the
        # ranking permutation, so equal-budget plans score identically.
        diversity = math.fsum(
            pools.capture(qid, plan.assignments[qid])
            for qid in sorted(plan.assignments)
        )
        return DiversityReport(
            budget=plan.budget,
            diversity=diversity,
            max_diversity=pools.max_diversity,
            answers_spent=plan.answers_spent,
            mode=mode,
        )

    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    total = 0
    for qid, n in plan.assignments.items():
        pool = pools.normalized[qid]
        truth = pools.truth[qid]
        if not truth:
            continue
        for trial in range(trials):
            rng = np.random.default_rng(
                [seed & _SEED_MASK, qid & _SEED_MASK, trial]
            )
            picked = {pool[i] for i in rng.permutation(pools.a)[:n]}
            total += len(picked & truth)
    return DiversityReport(
        budget=plan.budget,
        diversity=total / trials,
        max_diversity=pools.max_diversity,
        answers_spent=plan.answers_spent,
        mode=mode,
        trials=trials,
        seed=seed,
    )


@dataclass(frozen=True)
class SweepRow:
    ranking: str
    budget: int
    answers_spent: int
    diversity: float
    diversity_fraction: float
    cost_usd: float
    labor_hours: float


def sweep(
    corpus: Corpus,
    rankings: Mapping[str, Sequence[int] | Sequence[Sequence[int]]],
    budgets: Sequence[int],
    s: int = 1,
    r: int = 5,
    mode: str = "exact",
    trials: int = 1000,
    seed: int = 0,
) -> list[SweepRow]:
    """One row per (ranking, budget).

    A ranking entry may be a list of alternative orderings (e.g. several
    random priority orders); their diversities are averaged per budget.
    """
    pools = _AnswerPools(corpus)
    rows = []
    for name, entry in rankings.items():
        variants = _ranking_variants(entry)
        for budget in budgets:
            reports = [
                _simulate(make_plan(rk, budget, s, r), pools, mode, trials, seed)
                for rk in variants
            ]
            diversity = sum(rep.diversity for rep in reports) / len(reports)
            spent = reports[0].answers_spent
            fraction = 1.0 if pools.max_diversity == 0 else diversity / pools.max_diversity
            rows.append(
                SweepRow(
                    ranking=name,
                    budget=budget,
                    answers_spent=spent,
                    diversity=diversity,
                    diversity_fraction=fraction,
                    cost_usd=spent * ANSWER_COST_USD,
                    labor_hours=spent * SECONDS_PER_ANSWER / 3600.0,
                )
            )
    return rows


def _ranking_variants(entry) -> list[list[int]]:
    seq = list(entry)
    if not seq:
        raise ValueError("empty ranking entry")
    if isinstance(seq[0], (list, tuple)):
        return [list(rk) for rk in seq]
    return [seq]
