"""Exception hierarchy.

Every error carries the process exit code the command-line front end maps it
to: 2 usage/parse, 3 dimension, 4 transversality/complementarity, 5 numeric.
"""


class GapLabError(Exception):
    exit_code = 5


class FamilyFileError(GapLabError):
    exit_code = 2


class DimensionMismatch(GapLabError):
    exit_code = 3


class NotComplementary(GapLabError):
    exit_code = 4


class NotTransversal(GapLabError):
    exit_code = 4


class NotInvertible(GapLabError):
    pass


class NotLeftInvertible(GapLabError):
    pass


class NotInjective(GapLabError):
    pass


class NotSurjective(GapLabError):
    pass


class NotInDomain(GapLabError):
    pass


class NotHermitian(GapLabError):
    pass


class PreconditionViolated(GapLabError):
    pass


class NotAGraph(GapLabError):
    """The subspace meets the vertical axis ``{0} + C^n2``.

    ``witness`` is a unit vector of the subspace whose top block vanishes.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AdjointIsRelation(NotAGraph):
    """The orthogonal complement of the graph is not the graph of an operator.

    In finite dimensions this happens exactly when the domain is a proper
    subspace (the operator is not densely defined).
    """


class EvaluationFailed(GapLabError):
    def __init__(self, message, z=None, cause=None):
        super().__init__(message)
        self.z = z
        self.cause = cause
