"""Exception types shared across the package."""


class BoxlatError(Exception):
    """Base class for all boxlat errors."""


class DimensionMismatch(BoxlatError):
    """Operands have different dimensionality."""


class SupportViolation(BoxlatError):
    """A coordinate lies outside the measure's support."""


class UnknownConcept(BoxlatError):
    """A concept id is not present in the model vocabulary."""

    def __init__(self, concept):
        self.concept = concept
        super().__init__(f"unknown concept: {concept!r}")


class NullEvidence(BoxlatError):
    """Conditioning on an event of probability zero."""


class DegenerateMarginal(BoxlatError):
    """Correlation is undefined for marginals of exactly 0 or 1."""


class UnionCapExceeded(BoxlatError):
    """Too many boxes for exact union computation; decompose the query."""


class TrainingDiverged(BoxlatError):
    """Loss or gradients became non-finite during optimization."""


class CycleError(BoxlatError):
    """A graph required to be acyclic has a cycle; carries a witness."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(map(str, self.cycle)))


class DataFormatError(BoxlatError):
    """Malformed input file; carries path and line number when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(f"{loc}{message}")
