"""Exception hierarchy shared by all modules.

Every error raised on purpose derives from :class:`ProjGraftError`; the CLI maps
those to exit code 1 and everything in :class:`InputError` to exit code 2.
"""


class ProjGraftError(Exception):
    """Base class. ``str(err)`` is ``Name(args)`` optionally followed by a detail."""

    def __init__(self, *args, detail=None):
        super().__init__(*args)
        self.detail = detail

    def __str__(self):
        inner = ",".join(str(a) for a in self.args)
        text = f"{type(self).__name__}({inner})"
        if self.detail:
            text += f": {self.detail}"
        return text


class InputError(ProjGraftError):
    """Malformed documents and expressions."""


class ParseError(InputError):
    def __init__(self, position, message):
        super().__init__(position, detail=message)
        self.position = position


class DocumentError(InputError):
    def __init__(self, path, message):
        super().__init__(path, detail=message)
        self.path = path


# moebius
class DegenerateMap(ProjGraftError):
    pass


class AmbiguousClassification(ProjGraftError):
    pass


class IsIdentity(ProjGraftError):
    pass


class DegenerateImage(ProjGraftError):
    pass


class NonRealCenters(ProjGraftError):
    pass


# schottky
class CirclesOverlap(ProjGraftError):
    def __init__(self, i, j, detail=None):
        super().__init__(i, j, detail=detail)
        self.i, self.j = i, j


class PairingMismatch(ProjGraftError):
    def __init__(self, i, detail=None):
        super().__init__(i, detail=detail)
        self.index = i


class NonClassicalPairing(ProjGraftError):
    pass


class NestingViolation(ProjGraftError):
    pass


class CapExceeded(ProjGraftError):
    pass


# foldgraph
class InvalidRank(ProjGraftError):
    pass


class InvalidLabel(ProjGraftError):
    pass


class NotConnected(ProjGraftError):
    pass


class StalePair(ProjGraftError):
    pass


# multiarc
class Infeasible(ProjGraftError):
    pass


class InternalInvariantBreach(ProjGraftError):
    pass


# graftcalc
class SameBoundary(ProjGraftError):
    pass


class UnknownBoundary(ProjGraftError):
    pass


class InvalidChart(ProjGraftError):
    pass


class RHViolation(ProjGraftError):
    pass


class CarrierBroken(ProjGraftError):
    pass


class NotAdmissible(ProjGraftError):
    pass


class CarrierOverlap(ProjGraftError):
    pass


class EndpointMismatch(ProjGraftError):
    def __init__(self, meridian, count_a, count_b, detail=None):
        super().__init__(meridian, count_a, count_b, detail=detail)
        self.meridian = meridian
        self.counts = (count_a, count_b)


class InadmissibleLoopFormed(ProjGraftError):
    pass


class GluingError(ProjGraftError):
    pass


class EulerMismatch(ProjGraftError):
    pass


class MarkingMismatch(ProjGraftError):
    pass


class WordMismatch(ProjGraftError):
    pass


class DegreeMismatch(ProjGraftError):
    pass


# brancov
class InvalidRationalMap(ProjGraftError):
    pass


class RootFindingFailure(ProjGraftError):
    pass


class BranchValueTooClose(ProjGraftError):
    pass


class MatchingAmbiguous(ProjGraftError):
    pass


class WindingAmbiguous(ProjGraftError):
    pass
