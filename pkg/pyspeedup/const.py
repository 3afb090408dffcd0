"""Constants for the pyspeedup library."""

from enum import IntEnum, StrEnum

DEFAULT_THREADS = 1
DEFAULT_MAX_STEPS = 8
DEFAULT_BUDGET = None
BRUTE_FORCE_MAX_VERTICES = 24

# Round key used in ``bc_inputs`` as the default for every unlisted round
ANY_ROUND = 0

# JSON value tags
RATIONAL_TAG = "q"
BIT_TAG = "b"
SYMBOL_TAG = "s"
VIEW_TAG = "v"

CLAIMS_MANIFEST = "claims.json"


class Communication(StrEnum):
    """Communication primitive of one round"""

    COLLECT = "collect"
    SNAPSHOT = "snapshot"
    IMMEDIATE_SNAPSHOT = "iis"


class BlackBox(StrEnum):
    """Object called between the write and the snapshot of a round"""

    NONE = "none"
    TEST_AND_SET = "ts"
    BINARY_CONSENSUS = "bc"


class TaskKind(StrEnum):
    """Task families that can be built from parameters"""

    CONSENSUS = "consensus"
    WEAK_CONSENSUS = "weak_consensus"
    APPROX = "approx"
    LIBERAL_APPROX = "liberal_approx"
    CUSTOM = "custom"


class RuleName(StrEnum):
    """Named decision rules"""

    HALVING = "halving"
    TWO_PROC = "two-proc"
    TS_CONSENSUS = "ts-consensus"
    LEADER = "leader"


class ExportFormat(StrEnum):
    """Export formats"""

    JSON = "json"
    DOT = "dot"
    TABLE = "table"


class ClaimCheck(StrEnum):
    """Kinds of checks found in the claims manifest"""

    PROTOCOL_SHAPE = "protocol_shape"
    MODEL_CONTAINMENT = "model_containment"
    SOLVE = "solve"
    CLOSURE_EQUALS = "closure_equals"
    FIXED_POINT = "fixed_point"
    LOWER_BOUND = "lower_bound"
    RUN_RULE = "run_rule"
    SPEEDUP = "speedup"
    BRUTE_FORCE = "brute_force"
    UNIFORM_BETA = "uniform_beta"


class ExitCode(IntEnum):
    """Process exit codes of the command line"""

    OK = 0
    NEGATIVE = 1
    USAGE = 2
    RESOURCE_LIMIT = 3
