from enum import Enum, IntEnum, StrEnum
from pathlib import Path

PROJECT_ROOT = Path(__file__).parent.parent
SCENARIO_ROOT = PROJECT_ROOT / "scenarios"
NETWORK_ROOT = PROJECT_ROOT / "networks"
CONFIG_FILE = PROJECT_ROOT / "run.config.toml"

CODE_VERSION = "0.1.0"
SCENARIO_FILE_VERSION = 1


class Environment(StrEnum):
    DEVELOPMENT = "dev"
    STRICT = "strict"
    FAST = "fast"


class Compressor(StrEnum):
    GZIP = "gzip"
    LZMA = "lzma"


class Method(StrEnum):
    EXACT_EQ1 = "exact-eq1"
    POSTSELECT_EXACT = "postselect-exact"
    POVM = "povm"
    BROADCAST = "broadcast"
    SAMPLED = "sampled"
    TPM = "tpm"


class RouteName(StrEnum):
    """Route names accepted by the `exact --method` flag"""

    EQ1 = "eq1"
    POSTSELECT = "postselect"
    BROADCAST = "broadcast"
    POVM = "povm"


class ExitCode(IntEnum):
    OK = 0
    CHECK_FAILED = 1
    PARSE_ERROR = 2
    VALIDATION_ERROR = 3
    CAP_EXCEEDED = 4


class Figure(StrEnum):
    FIG2 = "fig2"
    FIG3 = "fig3"


class NamedModel(StrEnum):
    COHERENT_QUBIT = "coherent_qubit"
    QUBIT_PAIR = "qubit_pair"


class NamedUnitary(StrEnum):
    IDENTITY = "identity"
    PARTIAL_SWAP = "partial_swap"


class NamedBasis(StrEnum):
    COMPUTATIONAL = "computational"
    SIGMA_Z_PRODUCT = "sigma_z_product"


class OutputFormat(StrEnum):
    TEXT = "text"
    JSON = "json"


class NetworkNode(Enum):
    EIGENSTATE = "s"
    OUTCOME = "x"


compressor_extensions = {Compressor.GZIP.value: ".gz", Compressor.LZMA.value: ".xz"}

# numerical defaults, all overridable through run.config.toml, .env or flags
TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
TOL_UNITARY = 1e-9
TOL_NORM = 1e-9
TOL_ORTH = 1e-9
TOL_RECON = 1e-9
DEGENERACY_TOL = 1e-9
PHASE_TIE_TOL = 1e-12
POP_CUTOFF = 1e-14
DIMENSION_CAP = 4096
ENUMERATION_CAP = 10**6

NEGATIVE_PROBABILITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
POVM_TOL = 1e-9
POVM_POSITIVITY_TOL = 1e-10
FIRST_LAW_TOL = 1e-10
JARZYNSKI_TOL = 1e-9
THERMAL_TOL = 1e-9
WORK_BIN_TOL = 1e-9
DENOMINATOR_CUTOFF = 1e-14
ORACLE_TOL = 1e-10

SHOT_CHUNK = 1 << 16
DEFAULT_SEED = 0
DEFAULT_SHOTS = 100_000
MAX_SEED = 2**64

FIG2_T_RANGE = (0.05, 10.0)
FIG2_POINTS = 200
FIG2_A_VALUES = (0.0, 0.3, 0.6, 0.9)
FIG3_T_RANGE = (0.05, 5.0)
FIG3_POINTS = 200
FIG3_A_VALUES = (0.0, 0.3, 0.6, 0.9)
FIG3_T_A = 0.4
