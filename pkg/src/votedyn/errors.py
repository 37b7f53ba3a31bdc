"""Exception types shared across the package."""


class VotedynError(Exception):
    """Base class for all package-specific errors."""


class EntryOutOfRange(VotedynError):
    """An opinion value lies outside [-1, 1]."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"opinion[{index}] = {value!r} is outside [-1, 1]")


class EmptyProfile(VotedynError):
    """A profile must contain at least one agent."""


class LengthMismatch(VotedynError):
    """Two profiles of different lengths were compared."""


class IncrementOrderViolation(VotedynError):
    """Computed increment vector is not nondecreasing.

    The increment vector of a sorted profile is nondecreasing for exact
    arithmetic; a violation signals a bug (or an extreme float artifact)
    and is never silently absorbed.
    """


class ClassificationGap(VotedynError):
    """A verified fixed point matched none of the known forms.

    The classification of fixed points is exhaustive, so this indicates
    an implementation bug or a float artifact worth investigating.
    """


class ConstraintViolation(VotedynError):
    """A construction precondition failed."""

    def __init__(self, which, detail=""):
        self.which = which
        super().__init__(f"{which}: {detail}" if detail else which)


class DeltaTooLarge(VotedynError):
    """Perturbation size exceeds the admissible neighborhood radius."""


class OnHyperplane(VotedynError):
    """Perturbed point has interior sum exactly zero; no growth occurs there."""


class AsymmetricInfluence(VotedynError):
    """Window list is not mutually consistent (l in J(k) but k not in J(l))."""

    def __init__(self, k, l):
        self.k = k
        self.l = l
        super().__init__(f"asymmetric influence between indices {k} and {l}")


class InsufficientRecord(VotedynError):
    """Trajectory record too short for the requested analysis."""


class NotStabilized(VotedynError):
    """Linear frozen-window model does not match the actual dynamics."""


class ConfigError(VotedynError):
    """Configuration document failed to parse or validate.

    Carries the full list of problems, not just the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(str(p) for p in self.problems))
