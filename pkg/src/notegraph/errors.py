"""Exception hierarchy shared by all notegraph modules."""


class NotegraphError(Exception):
    """Base class for every error raised by this package."""


# --- MIDI parsing ---

class MidiParseError(NotegraphError):
    """Base class for Standard MIDI File parsing failures."""


class MalformedHeader(MidiParseError):
    pass


class UnsupportedFormat(MidiParseError):
    pass


class TruncatedChunk(MidiParseError):
    pass


class BadVariableLengthQuantity(MidiParseError):
    pass


# --- graph construction ---

class EmptySong(NotegraphError):
    """No note transitions survive in any channel."""


# --- metrics ---

class DegenerateGraph(NotegraphError):
    """Fewer than two nodes; the metric is undefined."""


class EmptyGraph(NotegraphError):
    pass


class EmptyCollection(NotegraphError):
    pass


# --- null models ---

class TooFewEdges(NotegraphError):
    pass


# --- Markov entropy ---

class NonConvergence(NotegraphError):
    def __init__(self, residual, max_iter):
        super().__init__(
            f"power iteration residual {residual:.3e} after {max_iter} iterations"
        )
        self.residual = residual
        self.max_iter = max_iter


# --- embeddings ---

class EmptyGroup(NotegraphError):
    pass


class ZeroVector(NotegraphError):
    pass


class EmptySet(NotegraphError):
    pass


# --- statistics ---

class EmptySample(NotegraphError):
    pass


class OutOfRange(NotegraphError):
    pass


class TooShort(NotegraphError):
    pass


class LengthMismatch(NotegraphError):
    pass


class ZeroVariance(NotegraphError):
    pass


# --- pipeline ---

class NoInputs(NotegraphError):
    pass


class UnwritableOutput(NotegraphError):
    pass


class InsufficientDecades(NotegraphError):
    pass


class InsufficientGroups(NotegraphError):
    pass
