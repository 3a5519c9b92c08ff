"""Exception taxonomy. Exit-status mapping lives in the cli module."""


class PirouetteError(Exception):
    """Base class for all package errors."""


class ConfigInvalid(PirouetteError):
    """A configuration file or flag set failed validation."""


class HypothesisViolated(PirouetteError):
    """An experiment precondition (index or rotation hypothesis) failed."""


class NumericalError(PirouetteError):
    """Base for failures of an iteration or a solve."""


class NonConvergence(NumericalError):
    """An iterative solve exhausted its budget without meeting tolerance."""


class Aliased(NumericalError):
    """Angle sampling could not reach the per-step guard within budget."""


class SeedDisagreement(NumericalError):
    """Independent seeds of an averaging estimate spread beyond tolerance."""


class OrbitEscaped(NumericalError):
    """An orbit segment left the window before the requested iterate count."""


class PunctureHit(NumericalError):
    """A trajectory passed too close to the puncture to keep a lift."""


class DomainError(PirouetteError):
    """Base for violated call preconditions (bad geometry or arguments)."""


class OutOfWindow(DomainError):
    """A point, or an implicit-solve solution, left the validity window."""


class NotCritical(DomainError):
    """The gradient does not vanish where a critical point was required."""


class NormalFormViolated(DomainError):
    """A Hessian is not in the normal form required for composition."""


class VanishingField(DomainError):
    """A displacement field got too small to certify a winding number."""


class FixedPointOnCurve(DomainError):
    """The index curve passes through a fixed point."""


class NotIsolated(DomainError):
    """Another near-fixed point was detected inside the screening region."""


class NotIrreducible(DomainError):
    """p/q was not in lowest terms."""


class ConvergedToPuncture(DomainError):
    """A critical-point search landed on the trivial fixed-point chain."""


class EmptySample(DomainError):
    """No grid orbit satisfied a sampling predicate."""


class InvariantBreach(PirouetteError):
    """An internal consistency check failed (symmetry, determinant, audit)."""


class IllConditioned(InvariantBreach):
    """An eigendecomposition residual was too large to trust."""
