"""Exception hierarchy shared by all modules.

Anything raised on malformed or out-of-contract input derives from
HclError so the CLI can map it to exit code 2.
"""


class HclError(Exception):
    pass


class ParseError(HclError):
    pass


class BoundarySquareNonzero(HclError):
    def __init__(self, j, row, colm, value):
        self.j, self.row, self.col, self.value = j, row, colm, value
        super().__init__(f"D_{j-1} D_{j} nonzero at entry ({row},{colm}): {value}")


class Disconnected(HclError):
    pass


class GapViolated(HclError):
    pass


class NotPositivelyAcyclic(HclError):
    pass


class NotInjective(HclError):
    pass


class NotATree(HclError):
    pass


class LevelMismatch(HclError):
    pass


class NotClosedUnderFaces(HclError):
    pass


class BadCoordinates(HclError):
    pass


class NonpositiveBeta(HclError):
    pass


class NotSmall(HclError):
    pass


class NotGood(HclError):
    pass


class NotACycle(HclError):
    pass


class LiftObstruction(HclError):
    pass


class BadFrame(HclError):
    pass


class QuadratureNoConvergence(HclError):
    pass


class EpsilonTooLarge(HclError):
    pass


class StepTooLarge(HclError):
    pass
