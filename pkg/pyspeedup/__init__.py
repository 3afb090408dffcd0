"""Pyspeedup: round complexity of distributed tasks through closure and speedup."""

from .closure import (
    ClosureEngine,
    LocalTask,
    closure,
    closure_beta,
    is_fixed_point,
    local_task,
    lower_bound_chain,
    speedup_transform,
)
from .complex import (
    ChromaticComplex,
    Simplex,
    Value,
    Vertex,
    View,
    faces,
    ids,
    make_complex,
    project,
)
from .const import BlackBox, Communication, RuleName, TaskKind
from .exceptions import (
    DocumentError,
    ModelError,
    PyspeedupError,
    ResourceLimitError,
    RuleError,
    SolverError,
    StepBudgetExceededError,
    TaskError,
)
from .models import (
    ModelSpec,
    OrderedPartition,
    ProtocolComplex,
    enumerate_collect_matrices,
    filter_immediate,
    filter_snapshot,
    one_round,
    protocol_complex,
)
from .rules import (
    DecisionRule,
    approx_round_lower_bound,
    bc_round_lower_bound,
    halving_rule,
    leader_rule,
    rule_map,
    run_rule,
    ts_consensus_rule,
    two_proc_approx_rule,
)
from .solver import SimplicialMap, Solvable, Unsolvable, solve, solve_exhaustive, verify_map
from .tasks import (
    Task,
    TaskFamily,
    approx_agreement,
    binary_consensus,
    liberal_approx_agreement,
    tasks_equal,
    weak_consensus,
)

__version__ = "0.1.0"

__all__ = [
    "BlackBox",
    "ChromaticComplex",
    "ClosureEngine",
    "Communication",
    "DecisionRule",
    "DocumentError",
    "LocalTask",
    "ModelError",
    "ModelSpec",
    "OrderedPartition",
    "ProtocolComplex",
    "PyspeedupError",
    "ResourceLimitError",
    "RuleError",
    "RuleName",
    "SimplicialMap",
    "Simplex",
    "Solvable",
    "SolverError",
    "StepBudgetExceededError",
    "Task",
    "TaskError",
    "TaskFamily",
    "TaskKind",
    "Unsolvable",
    "Value",
    "Vertex",
    "View",
    "approx_agreement",
    "approx_round_lower_bound",
    "bc_round_lower_bound",
    "binary_consensus",
    "closure",
    "closure_beta",
    "enumerate_collect_matrices",
    "faces",
    "filter_immediate",
    "filter_snapshot",
    "halving_rule",
    "ids",
    "is_fixed_point",
    "leader_rule",
    "liberal_approx_agreement",
    "local_task",
    "lower_bound_chain",
    "make_complex",
    "one_round",
    "project",
    "protocol_complex",
    "rule_map",
    "run_rule",
    "solve",
    "solve_exhaustive",
    "speedup_transform",
    "tasks_equal",
    "ts_consensus_rule",
    "two_proc_approx_rule",
    "verify_map",
    "weak_consensus",
]
