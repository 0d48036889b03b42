"""Exceptions for the wave calculus"""


class ConfigurationException(Exception):
    """Exception raised for an invalid grid, shell parameter or run configuration"""


class ContractViolationException(Exception):
    """Error if a field is passed in the wrong representation or shape"""


class DomainException(Exception):
    """Error if an angular scale exceeds its frequency scale"""


class UnsupportedDimensionException(Exception):
    """Error if an operation has no meaning in the requested dimension"""


class UnboundedKernelException(Exception):
    """Error if a kernel bound is requested for a family without uniformly L¹ kernels"""


class LightConeException(Exception):
    """Error if a spectrum touches the light cone where a division by the wave symbol is needed"""


class RangeException(Exception):
    """Error if a rescaled spectrum leaves the grid"""


class InadmissibleExponentsException(Exception):
    """Error if Strichartz exponents violate admissibility"""


class HypothesisException(Exception):
    """Error if an estimate or lemma is run outside of its hypotheses"""


class NotConvergedException(Exception):
    """Error if scattering data is requested from an iteration which did not converge"""
