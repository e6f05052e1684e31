"""Exception types shared across the package."""


class KRError(Exception):
    """Base class for all krsurf errors."""


class SignatureMismatch(KRError):
    """Two descriptors or graphs do not live on the same surface signature."""


class InvalidDescriptor(KRError):
    """A Morse descriptor failed validation where a valid one is required."""


class InvalidGraph(KRError):
    """A KR graph failed validation where a valid one is required."""


class NonGeneric(KRError):
    """Operation requires a generic graph (pairwise distinct critical heights)."""


class WallMismatch(KRError):
    """Wall welds do not close up into boundary circles."""


class InvalidSpec(KRError):
    """A block specification (XSpec/YSpec) is malformed."""


class NonRealizable(KRError):
    """No canonical graph realizes the requested invariants."""


class InapplicableMove(KRError):
    """A surgery instance does not match the current graph."""


class NormalizationStuck(KRError):
    """Normalization could not reach a canonical form with the move table."""

    def __init__(self, message, graph=None):
        super().__init__(message)
        self.graph = graph


class ExceptionalValue(KRError):
    """Attempted to cut at a critical or constant-boundary value."""


class GluingMismatch(KRError):
    """Cut pieces cannot be reassembled with the given pairing."""


class InterfaceMismatch(KRError):
    """Paired cut pieces do not share interface data."""


class ParseError(KRError):
    """Text input does not conform to the KRG grammar."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
