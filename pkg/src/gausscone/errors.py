"""Exception taxonomy shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every toolkit-specific failure."""


class DomainError(ToolkitError):
    """Point lies outside the closure of the support cone."""


class SingularityError(ToolkitError):
    """Derivative of log w requested on the zero set of the weight."""


class NotHomogeneousError(ToolkitError):
    """Operation requires a homogeneous weight but none was given."""


class AmbiguousNormalError(ToolkitError):
    """Outward normal requested at a ridge or vertex of the cone."""


class NoBoundaryError(ToolkitError):
    """Boundary operation on a cone without boundary."""


class InadmissibleWeightError(ToolkitError):
    """Certified curvature bound violates K_w > -1."""


class UncertifiedCurvatureError(ToolkitError):
    """Operation needs K_w but the weight carries no curvature certificate."""


class ResourceError(ToolkitError):
    """Requested rule size exceeds the supported resource limits."""


class UnsupportedRuleError(ToolkitError):
    """No quadrature construction is available for this weight/cone pair."""


class IntegrationFailureError(ToolkitError):
    """The requested integral diverges or could not be normalized."""


class EvaluationError(ToolkitError):
    """Non-finite value met while evaluating an integrand."""


class DecayContractError(ToolkitError):
    """Unnormalized integration of a field without a Gaussian decay envelope."""


class ContractError(ToolkitError):
    """Operation called outside its stated contract."""


class ParameterError(ToolkitError):
    """Invalid parameter combination (e.g. p >= q, lambda <= 0)."""


class DegenerateInputError(ToolkitError):
    """Zero or otherwise degenerate input field."""


class MeanZeroViolationError(ToolkitError):
    """Poisson right-hand side carries a non-negligible constant component."""


class DegreeTooHighError(ToolkitError):
    """Galerkin Gram matrix is numerically singular at this degree."""


class ConfigError(ToolkitError):
    """Malformed run configuration."""
