"""Command-line pipeline: analyze, vocab, train, predict, eval, allocate, sweep.

Every command writes its resolved run configuration (run_config.json)
next to its outputs, so a finished run can be reproduced exactly. Exit
codes: 0 success, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .allocation import (
    make_plan,
    oracle_ranking,
    rank_by_disagreement,
    status_quo_ranking,
    sweep,
)
from .answers import agreement_by_answer_type, agreement_label, diversity_histogram
from .corpus import load_corpus, load_image_features
from .errors import CrowdConsensusError, DimensionMismatch, EmptyTrainingSet
from .evalmetrics import pr_curve, stratified_eval
from .features import (
    FeatureMode,
    build_vocabularies,
    extract_matrix,
    save_vocabularies,
)
from .forest import ForestConfig, load_model, predict_many, save_model, train_forest

SEED_ENV_VAR = "CROWD_CONSENSUS_SEED"

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CrowdConsensusError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except Exception as exc:  # invariant violations and the unexpected
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR


def entrypoint() -> None:
    sys.exit(main())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowd-consensus",
        description="Analyze crowd answer agreement for visual questions, "
        "predict it, and allocate answer-collection budgets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = _command(sub, "analyze", cmd_analyze, "Diversity histograms and agreement-by-type rates")
    _corpus_flags(p)
    p.add_argument("--m", type=int, default=None,
                   help="single agreement threshold (default: histograms for m=1,2,3)")

    p = _command(sub, "vocab", cmd_vocab, "Build first/second-word vocabularies")
    _corpus_flags(p)

    p = _command(sub, "train", cmd_train, "Train the disagreement classifier")
    _corpus_flags(p)
    p.add_argument("--image-features", help="saliency CSV (image_id,p0..p4)")
    p.add_argument("--mode", choices=[m.value for m in FeatureMode], default="qi")
    p.add_argument("--layout", choices=["truncated", "zeroed"], default="truncated")
    p.add_argument("--trees", type=int, default=25)
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default: ${SEED_ENV_VAR} or 0)")
    p.add_argument("--model", help="output model path (default: OUT_DIR/model.json)")

    p = _command(sub, "predict", cmd_predict, "Per-question disagreement probabilities")
    _corpus_flags(p)
    p.add_argument("--image-features")
    p.add_argument("--model", required=True)

    p = _command(sub, "eval", cmd_eval, "Precision-recall curves and AP report")
    _corpus_flags(p)
    p.add_argument("--image-features")
    p.add_argument("--model", required=True)

    p = _command(sub, "allocate", cmd_allocate, "Per-question answer-count plan")
    _corpus_flags(p)
    p.add_argument("--image-features")
    p.add_argument("--model", required=True)
    p.add_argument("--budget", type=int, required=True,
                   help="number of questions granted R answers")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--r", type=int, default=5)

    p = _command(sub, "sweep", cmd_sweep, "Diversity vs budget for ours/status-quo/oracle")
    _corpus_flags(p)
    p.add_argument("--image-features")
    p.add_argument("--model", required=True)
    p.add_argument("--budgets", help="comma-separated budgets (default: 11 even steps)")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--r", type=int, default=5)
    p.add_argument("--sim", choices=["exact", "mc"], default="exact")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--status-quo-seeds", type=int, default=1,
                   help="random orderings averaged into the status-quo rows")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--plot-data", action="store_true",
                   help="also write plot_data.json with x/y series per ranking")

    return parser


def _command(sub, name, func, help_text):
    p = sub.add_parser(name, help=help_text)
    p.set_defaults(func=func)
    p.add_argument("--out-dir", default=".", help="directory for outputs")
    return p


def _corpus_flags(p) -> None:
    p.add_argument("--corpus", required=True, help="questions file")
    p.add_argument("--annotations", help="annotations file (vqa_v1_json only)")
    p.add_argument("--format", choices=["jsonl", "vqa_v1_json"], default="jsonl")
    p.add_argument("--skip-malformed", action="store_true",
                   help="drop questions with the wrong answer count instead of failing")


def _load(args):
    return load_corpus(
        args.corpus,
        annotations_source=args.annotations,
        format=args.format,
        skip_malformed=args.skip_malformed,
    )


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_config(out: Path, args, **resolved) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config.update(resolved)
    with open(out / "run_config.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_analyze(args) -> int:
    corpus = _load(args)
    out = _out_dir(args)
    thresholds = [args.m] if args.m is not None else [1, 2, 3]
    for m in thresholds:
        hist = diversity_histogram(corpus, m)
        _write_csv(
            out / f"histogram_m{m}.csv",
            ["m", "k", "count"],
            [[m, k, count] for k, count in sorted(hist.items())],
        )
    rates = agreement_by_answer_type(corpus)
    _write_csv(
        out / "answer_types.csv",
        ["answer_type", "unanimous", "exactly_one", "at_most_one", "n"],
        [
            [
                stratum,
                _fmt(r.unanimous_rate),
                _fmt(r.exactly_one_disagreement_rate),
                _fmt(r.at_most_one_disagreement_rate),
                r.n,
            ]
            for stratum, r in rates.items()
        ],
    )
    _write_run_config(out, args)
    return EXIT_OK


def cmd_vocab(args) -> int:
    corpus = _load(args)
    out = _out_dir(args)
    save_vocabularies(build_vocabularies(corpus), out / "vocabularies.json")
    _write_run_config(out, args)
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = _load(args)
    if len(corpus) == 0:
        raise EmptyTrainingSet(f"no questions in {args.corpus}")
    seed = _resolve_seed(args)
    out = _out_dir(args)
    vocab = build_vocabularies(corpus)
    table = load_image_features(args.image_features) if args.image_features else None
    mode = FeatureMode(args.mode)
    X = extract_matrix(corpus, vocab, table, mode, args.layout)
    y = [agreement_label(vq.raw_answers) for vq in corpus]
    model = train_forest(
        X,
        y,
        ForestConfig(n_trees=args.trees, seed=seed),
        vocab=vocab,
        feature_mode=mode,
        layout=args.layout,
    )
    model_path = Path(args.model) if args.model else out / "model.json"
    tmp = model_path.with_suffix(model_path.suffix + ".tmp")
    try:
        save_model(model, tmp)
        os.replace(tmp, model_path)
    finally:
        tmp.unlink(missing_ok=True)
    _write_run_config(out, args, seed=seed, model=str(model_path))
    return EXIT_OK


def _model_predictions(args):
    """(corpus, model, predictions) for the commands that apply a model."""
    model = load_model(args.model)
    if model.vocab is None:
        raise DimensionMismatch(
            f"{args.model} carries no vocabularies and cannot featurize a corpus"
        )
    corpus = _load(args)
    table = load_image_features(args.image_features) if args.image_features else None
    X = extract_matrix(corpus, model.vocab, table, model.feature_mode, model.layout)
    return corpus, model, predict_many(model, X)


def cmd_predict(args) -> int:
    corpus, _, predictions = _model_predictions(args)
    out = _out_dir(args)
    _write_csv(
        out / "predictions.csv",
        ["question_id", "p_disagreement", "label"],
        [
            [vq.question_id, _fmt(pred.p_disagreement), pred.label.value]
            for vq, pred in zip(corpus, predictions)
        ],
    )
    _write_run_config(out, args)
    return EXIT_OK


def cmd_eval(args) -> int:
    corpus, _, predictions = _model_predictions(args)
    out = _out_dir(args)
    scores = [pred.p_disagreement for pred in predictions]
    labels = [agreement_label(vq.raw_answers) for vq in corpus]
    types = [vq.answer_type for vq in corpus]
    report = stratified_eval(scores, labels, types)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "ap_overall": report.ap_overall,
                "ap_by_type": dict(report.ap_by_type),
                "n_by_type": dict(report.n_by_type),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    _write_curve(out / "pr_overall.csv", scores, labels)
    for stratum in report.ap_by_type:
        rows = [i for i, t in enumerate(types) if (t or "unknown") == stratum]
        _write_curve(
            out / f"pr_{stratum.replace('/', '_')}.csv",
            [scores[i] for i in rows],
            [labels[i] for i in rows],
        )
    _write_run_config(out, args)
    return EXIT_OK


def _write_curve(path: Path, scores, labels) -> None:
    curve = pr_curve(scores, labels)
    _write_csv(
        path,
        ["threshold", "recall", "precision"],
        [[_fmt(pt.threshold), _fmt(pt.recall), _fmt(pt.precision)] for pt in curve.points],
    )


def cmd_allocate(args) -> int:
    corpus, _, predictions = _model_predictions(args)
    out = _out_dir(args)
    p_by_id = {
        vq.question_id: pred.p_disagreement for vq, pred in zip(corpus, predictions)
    }
    ranking = rank_by_disagreement(p_by_id, corpus.question_ids())
    plan = make_plan(ranking, args.budget, args.s, args.r)
    _write_csv(
        out / "plan.csv",
        ["question_id", "answer_count", "p_disagreement"],
        [
            [qid, plan.assignments[qid], _fmt(p_by_id[qid])]
            for qid in corpus.question_ids()
        ],
    )
    _write_run_config(out, args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    corpus, _, predictions = _model_predictions(args)
    seed = _resolve_seed(args)
    out = _out_dir(args)
    ids = corpus.question_ids()
    p_by_id = {
        vq.question_id: pred.p_disagreement for vq, pred in zip(corpus, predictions)
    }
    rankings = {
        "ours": rank_by_disagreement(p_by_id, ids),
        "status_quo": [
            status_quo_ranking(ids, [seed, k]) for k in range(args.status_quo_seeds)
        ],
        "oracle": oracle_ranking(corpus),
    }
    budgets = _parse_budgets(args.budgets, len(corpus))
    rows = sweep(
        corpus,
        rankings,
        budgets,
        s=args.s,
        r=args.r,
        mode=args.sim,
        trials=args.trials,
        seed=seed,
    )
    _write_csv(
        out / "sweep.csv",
        ["ranking", "budget", "answers_spent", "diversity",
         "diversity_fraction", "cost_usd", "labor_hours"],
        [
            [row.ranking, row.budget, row.answers_spent, _fmt(row.diversity),
             _fmt(row.diversity_fraction), _fmt(row.cost_usd), _fmt(row.labor_hours)]
            for row in rows
        ],
    )
    if args.plot_data:
        series = {}
        for row in rows:
            entry = series.setdefault(row.ranking, {"name": row.ranking, "x": [], "y": []})
            entry["x"].append(row.answers_spent)
            entry["y"].append(row.diversity_fraction)
        with open(out / "plot_data.json", "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "x_label": "answers_spent",
                    "y_label": "diversity_fraction",
                    "series": list(series.values()),
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
    _write_run_config(out, args, seed=seed, budgets=budgets)
    return EXIT_OK


def _parse_budgets(raw: str | None, n: int) -> list[int]:
    if raw is None:
        return sorted({round(n * i / 10) for i in range(11)})
    try:
        budgets = [int(b) for b in raw.split(",") if b.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --budgets value {raw!r}: {exc}") from exc
    if not budgets:
        raise ValueError("--budgets is empty")
    return budgets
