'''
Exceptions raised across the toolkit. Every error derives from
TransportToolkitError and from the closest builtin, so callers may catch
either.
'''


class TransportToolkitError(Exception):
    pass


class NegativeEntry(TransportToolkitError, ValueError):
    pass


class SumNotOne(TransportToolkitError, ValueError):
    pass


class ShapeMismatch(TransportToolkitError, ValueError):
    pass


class TooSmallProblem(TransportToolkitError, ValueError):
    pass


class ZeroCost(TransportToolkitError, ValueError):
    pass


class BadEpsPrime(TransportToolkitError, ValueError):
    pass


class IndexOutOfRange(TransportToolkitError, IndexError):
    pass


class NonFinite(TransportToolkitError, FloatingPointError):
    pass


class DegenerateRow(TransportToolkitError, ValueError):
    pass


class AllZero(TransportToolkitError, ValueError):
    pass


class TooLarge(TransportToolkitError, ValueError):
    pass


class DegenerateInput(TransportToolkitError, ValueError):
    pass


class InvalidConfig(TransportToolkitError, ValueError):
    pass


class ParseError(TransportToolkitError, ValueError):
    pass


class DidNotConverge(TransportToolkitError, RuntimeError):
    '''
    Raised in strict mode when a solver hits its iteration cap. The flagged
    result is still available through the 'result' attribute.
    '''
    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class DidNotConvergeWarning(UserWarning):
    pass
