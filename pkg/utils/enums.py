from enum import Enum, IntEnum


class ExitCode(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 1
    USAGE = 2
    CAPACITY = 3
    BAD_INPUT = 4


class PauliKind(Enum):
    Z = "Z"
    X = "X"


class KernelSign(IntEnum):
    """Sign of the phase-space kernel: -1 gives Q-symbols, +1 the dual P-kernel."""
    MINUS = -1
    PLUS = 1


class SymbolKind(Enum):
    Q = "Q"
    P = "P"


class SpaceMethod(Enum):
    EXHAUSTIVE = "exhaustive"
    ORBITS = "orbits"


class QTildeMethod(Enum):
    FULL = "full"
    SYMMETRIC = "symmetric"
    ANALYTIC = "analytic"


class StateKind(Enum):
    GHZ = "ghz"
    FIDUCIAL = "fiducial"
    DICKE = "dicke"
    FILE = "file"


class ReconstructionMode(Enum):
    FULL = "full"
    SYMMETRIC = "symmetric"


class Protocol(Enum):
    COLLECTIVE = "collective"
    SIC = "sic"


class Ensemble(Enum):
    PURE = "pure"
    MIXED = "mixed"


class Suite(Enum):
    SIC = "sic"
    KERNELS = "kernels"
    COLLECTIVE = "collective"
    TOMOGRAPHY = "tomography"
    SYMMETRIC = "symmetric"
    ALL = "all"
