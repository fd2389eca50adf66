"""Exception types shared across the package."""


class GroupError(Exception):
    pass


class CapExceeded(GroupError):
    def __init__(self, cap, what="group"):
        super().__init__(f"{what} grew past cap {cap}")
        self.cap = cap


class OracleInconsistent(GroupError):
    pass


class NotNormal(GroupError):
    pass


class NotAbelian(GroupError):
    pass


class NotAHomomorphism(GroupError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class MixedParameters(GroupError):
    pass


class BadPrime(GroupError):
    pass


class NotWellDefined(GroupError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotIso(GroupError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotStable(GroupError):
    def __init__(self, msg, level=None):
        super().__init__(msg)
        self.level = level


class PresentationSyntaxError(GroupError, ValueError):
    def __init__(self, msg, position):
        super().__init__(f"{msg} at position {position}")
        self.position = position


class UndeclaredGenerator(GroupError, ValueError):
    pass


class LimitExceeded(GroupError):
    """Coset enumeration did not close: possibly infinite, or limits too small."""


class RelatorViolation(GroupError):
    pass
