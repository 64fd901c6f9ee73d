class TreeCapError(ValueError):
    """ Base class of every error raised by TreeCap. The CLI turns any
    of these into exit code 2 with a one-line diagnostic. """


class TreeError(TreeCapError):
    """ Malformed adjacency, unknown edge ids or an invalid TreeSpec. """


class MeasureError(TreeCapError):
    """ A function on edges that is not the co-potential of a measure. """


class CapacityError(TreeCapError):
    pass


class ConvergenceError(CapacityError):
    """ The variational oracle did not close its duality gap. The best
    admissible value, the measure lower bound and the admissible edge
    function are kept on the exception. """

    def __init__(self, message: str, best_value: float, bound: float, f=None):
        super().__init__(message)
        self.best_value = best_value
        self.bound = bound
        self.f = f


class TilingError(TreeCapError):
    pass


class ConstructionError(TreeCapError):
    pass


class ConfigError(TreeCapError):
    pass
