"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without
a lookup table: 2 for bad input, 3 for resource caps, 4 for algorithmic
failures.
"""


class HKRealError(Exception):
    exit_code = 1


class InputError(HKRealError, ValueError):
    exit_code = 2


class ResourceError(HKRealError):
    exit_code = 3


class AlgorithmError(HKRealError):
    exit_code = 4


# lattice_core
class NotSquare(InputError):
    pass


class NotSymmetric(InputError):
    pass


class DegenerateSpan(AlgorithmError):
    pass


class BoxTooLarge(ResourceError):
    pass


# involution
class NotInvolutive(InputError):
    pass


class NotIsometry(InputError):
    pass


class SearchSpaceTooLarge(ResourceError):
    pass


# period_domain / moves
class InvalidTriple(InputError):
    pass


class GammaDegenerate(AlgorithmError):
    pass


class NotInCone(InputError):
    pass


class WrongComponent(InputError):
    pass


class NotOrthogonal(InputError):
    pass


class NotInEigenspace(InputError):
    pass


class NotGeneric(AlgorithmError):
    pass


class PositivityLost(AlgorithmError):
    pass


class NotEnoughPositiveSquares(AlgorithmError):
    pass


# planner
class NotRealHomologicalType(InputError):
    pass


class TargetNotPositive(InputError):
    pass


class TargetNotInMinus(InputError):
    pass


class GenericityUnreachable(AlgorithmError):
    pass


class LemmaFailed(AlgorithmError):
    pass
