"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class DisclabError(Exception):
    exit_code = 2


class DimensionError(DisclabError, ValueError):
    pass


class ParameterError(DisclabError, ValueError):
    pass


class ValidationError(DisclabError, ValueError):
    pass


class ConstructionError(DisclabError, ValueError):
    pass


class PreconditionError(DisclabError, ValueError):
    pass


class GenerationError(DisclabError, RuntimeError):
    pass


class CapacityError(DisclabError):
    exit_code = 3

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds enumeration cap {cap}")
        self.size = size
        self.cap = cap
