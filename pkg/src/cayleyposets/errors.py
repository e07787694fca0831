"""Exception hierarchy shared by all modules."""


class CayleyError(Exception):
    """Base class for every error raised by this package."""


class CycleError(CayleyError):
    """The reflexive-transitive closure of a relation is not antisymmetric."""


class UnknownLabel(CayleyError):
    pass


class SizeLimit(CayleyError):
    """A configured size or count cap was exceeded."""


class SchemaError(CayleyError):
    pass


class IncompatibleAct(CayleyError):
    """(xs)s' != x(ss') for some x, s, s'."""


class NotAPartialOrder(CayleyError):
    pass


class NotClosed(CayleyError):
    pass


class CertificateInvalid(CayleyError):
    pass


class KindMismatch(CayleyError):
    pass


class NotARetract(CayleyError):
    pass


class PreconditionFailed(CayleyError):
    pass


class NotASemilattice(CayleyError):
    pass


class NotJoinIrreducible(CayleyError):
    pass


class NotAHomomorphism(CayleyError):
    pass


class HypothesisFailed(CayleyError):
    pass


class ArityMismatch(CayleyError):
    pass


class NotPointed(CayleyError):
    pass


class NoMinimum(CayleyError):
    pass
