"""Exception types shared across the toolkit."""


class CrowdConsensusError(Exception):
    """Base class for all toolkit-specific errors."""


class ParseError(CrowdConsensusError):
    """An input file is malformed for its declared format."""


class MissingAnnotation(CrowdConsensusError):
    """A question has no matching answer record."""


class AnswerCountMismatch(CrowdConsensusError):
    """A question's answer list does not match the corpus answer count."""


class InvalidProbability(CrowdConsensusError):
    """A saliency row has a negative component or sums too far from 1."""


class InvalidThreshold(CrowdConsensusError):
    """Agreement threshold outside [1, answers-per-question]."""


class EmptyQuestion(CrowdConsensusError):
    """Question text contains no tokens after cleanup."""


class EmptyNode(CrowdConsensusError):
    """Impurity requested for a node with no samples."""


class EmptyTrainingSet(CrowdConsensusError):
    """Too few training examples to fit a model."""


class DimensionMismatch(CrowdConsensusError):
    """Feature vector width incompatible with the model or data."""


class FormatVersionMismatch(CrowdConsensusError):
    """A model file is corrupt or written by an incompatible version."""


class NoPositives(CrowdConsensusError):
    """Ranking metrics need at least one disagreement-labeled item."""


class LengthMismatch(CrowdConsensusError):
    """Parallel input lists have different lengths."""


class MissingPrediction(CrowdConsensusError):
    """A ranking was requested for questions that lack predictions."""


class InvalidBudget(CrowdConsensusError):
    """Budget outside [0, number of questions]."""


class InvalidCounts(CrowdConsensusError):
    """Per-question answer counts violate 1 <= S < R <= answers available."""


class KeyMismatch(CrowdConsensusError):
    """Two per-question maps do not cover the same question ids."""
