"""Exception types shared across gdforge."""


class GDForgeError(Exception):
    """Base class for all gdforge errors."""


class NonHomogeneous(GDForgeError):
    pass


class BasisMismatch(GDForgeError):
    pass


class ConstraintViolated(GDForgeError):
    """A family parameter breaks one of the family's side conditions."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        msg = condition if not detail else f"{condition}: {detail}"
        super().__init__(msg)


class LevelsNotSupported(GDForgeError):
    pass


class OddDerivation(GDForgeError):
    pass


class OddXi(GDForgeError):
    pass


class NonConstantXi(GDForgeError):
    pass


class TwistMismatch(GDForgeError):
    """The derivation/scalar pair fails the twisted derivation law of the bracket."""

    def __init__(self, u, v, residual):
        self.u, self.v, self.residual = u, v, residual
        super().__init__(f"twist law fails on ({u}, {v}): residual {residual}")


class ConditionViolated(GDForgeError):
    """Carries the offending residual element."""

    def __init__(self, condition: str, residual):
        self.condition = condition
        self.residual = residual
        super().__init__(f"{condition}; residual = {residual}")


class NonCommutingDerivations(GDForgeError):
    def __init__(self, key, residual):
        self.key, self.residual = key, residual
        super().__init__(f"derivations do not commute on {key}: [d1, d2] = {residual}")


class NotQuadratic(GDForgeError):
    pass


class CaseParameterMismatch(GDForgeError):
    pass


class TableDomainError(GDForgeError):
    """An explicit table was asked for a product outside its recorded domain."""


class ParseError(GDForgeError):
    pass


class UnknownLaw(GDForgeError):
    pass
