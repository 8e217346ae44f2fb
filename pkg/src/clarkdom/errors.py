"""Exception types raised across the package."""


class DomainMismatchError(ValueError):
    """Points or functions do not conform to the product domain they are used on."""


class SingularKernelError(ArithmeticError):
    """A Cauchy-type kernel was evaluated at a pair with ``<z_j, zeta_j> == 1``."""


class RootFindingError(ArithmeticError):
    """Polynomial root solving broke down (non-convergence or roots off the circle)."""


class QuadratureError(RuntimeError):
    """Evaluating an integrand failed at a specific node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
