"""Exception types raised by the gaugelab modules."""


class GaugelabError(Exception):
    """Base class for all gaugelab errors."""


class BoundaryLeak(GaugelabError):
    """Wavefunction tail at the grid edge exceeds the leak threshold; enlarge L."""


class NotConverged(GaugelabError):
    """Doubling the grid shifts retained eigenvalues beyond tolerance."""


class CalibrationFailed(GaugelabError):
    """Potential-shape root finder exhausted its iteration budget."""


class DimensionMismatch(GaugelabError):
    """Operand dimensions are inconsistent with the target space."""


class UnsupportedKind(GaugelabError):
    """Unknown model kind requested."""


class ClosedFormNeedsTwoLevels(GaugelabError):
    """The closed-form difference operator is defined only for M = 1."""


class SolverFailure(GaugelabError):
    """Eigensolver output violated its residual or orthonormality contract."""


class NotNormalized(GaugelabError):
    """State vector is not normalized to within tolerance."""


class MissingContext(GaugelabError):
    """Frame context lacks an operator required by the requested representation."""


class SpaceMismatch(GaugelabError):
    """State vector lives on a different space than the observable representation."""


class CutoffCeiling(GaugelabError):
    """Convergence escalation exhausted its cutoff budget."""


class DegenerateGapAmbiguity(GaugelabError):
    """Two transition-gap clusters are too close to separate at this tolerance."""


class NonUniqueSteadyState(GaugelabError):
    """Lindblad generator has a null space of dimension greater than one."""


class StepFailure(GaugelabError):
    """Density-matrix integrator failed to complete the requested time grid."""


class ConfigError(GaugelabError):
    """Experiment configuration failed validation."""
