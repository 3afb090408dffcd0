"""Explicit decision rules and closed form round bounds."""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
import logging

from pyspeedup.complex import Value, Vertex, View
from pyspeedup.const import RuleName
from pyspeedup.exceptions import MissingPeerValueError, PartialRuleError, RuleError
from pyspeedup.models import ModelSpec, protocol_complex
from pyspeedup.solver import SimplicialMap, verify_map
from pyspeedup.tasks import Task

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecisionRule:
    """Named rule deciding a value from a process id and its view of one round."""

    name: str
    rule: Callable[[int, View], Value]

    def __call__(self, pid: int, view: View) -> Value:
        """Apply the rule."""
        return self.rule(pid, view)


def _grid_of(view: View) -> int:
    for _, value in view.seen:
        if value.is_rational:
            return value.payload[1]
    raise PartialRuleError(f"View {view.label()} carries no grid value")


def halving_rule(eps: Fraction) -> DecisionRule:
    """Decide min(max, min + eps) over the values seen, the box output is ignored."""

    def rule(pid: int, view: View) -> Value:
        m = _grid_of(view)
        seen = [value.fraction for _, value in view.seen]
        return Value.from_fraction(min(max(seen), min(seen) + eps), m)

    return DecisionRule(f"halving({eps})", rule)


def two_proc_outputs(
    eps: Fraction, y1: Fraction, y2: Fraction
) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Outputs (solo low, high sees both, low sees both, solo high) for y1 <= y2."""
    if y1 > y2:
        raise ValueError("Expected y1 <= y2")
    z = min(y2, y1 + eps)
    return y1, z, min(y2, z + eps), y2


def two_proc_approx_rule(eps: Fraction) -> DecisionRule:
    """Two process approximate agreement, shrinking a 3·eps spread to eps.
    The process holding the smaller value (ties by id) takes the low role.
    """

    def rule(pid: int, view: View) -> Value:
        if len(view.seen) == 1:
            return view.seen[0][1]
        if len(view.seen) != 2:
            raise PartialRuleError(f"Two process rule applied to {view.label()}")
        (low_value, low_pid), (high_value, _) = sorted(
            (value.fraction, seen_pid) for seen_pid, value in view.seen
        )
        _, high_both, low_both, _ = two_proc_outputs(eps, low_value, high_value)
        decided = low_both if pid == low_pid else high_both
        return Value.from_fraction(decided, _grid_of(view))

    return DecisionRule(f"two-proc({eps})", rule)


def ts_consensus_rule() -> DecisionRule:
    """Test&set winner keeps its input, the loser adopts the other input."""

    def rule(pid: int, view: View) -> Value:
        if view.box_output == 1:
            own = view.get(pid)
            if own is None:
                raise PartialRuleError(f"View {view.label()} misses its own value")
            return own
        peers = [value for seen_pid, value in view.seen if seen_pid != pid]
        if not peers:
            raise MissingPeerValueError(
                f"Process {pid} lost test&set but saw no other value in {view.label()}"
            )
        return peers[0]

    return DecisionRule(str(RuleName.TS_CONSENSUS), rule)


def leader_rule(beta: Mapping[int, int]) -> DecisionRule:
    """Adopt the value of the process whose binary consensus input was decided."""

    def rule(pid: int, view: View) -> Value:
        if view.box_output is None:
            raise PartialRuleError(f"View {view.label()} has no box output")
        leaders = [
            value for seen_pid, value in view.seen if beta.get(seen_pid) == view.box_output
        ]
        if not leaders:
            raise MissingPeerValueError(
                f"No process proposing {view.box_output} in {view.label()}"
            )
        return leaders[0]

    return DecisionRule(str(RuleName.LEADER), rule)


def rule_schedule(
    name: RuleName, task: Task, t: int, beta: Mapping[int, int] | None = None
) -> list[DecisionRule]:
    """Rules of rounds 1..t for a named rule.
    Approximate agreement rules relax their bound by the round factor so the
    last round reaches the task bound.
    """
    if name in (RuleName.HALVING, RuleName.TWO_PROC):
        family = task.family
        if family is None or family.eps_num is None or family.m is None:
            raise RuleError(f"Rule '{name}' needs an approximate agreement task")
        eps = Fraction(family.eps_num, family.m)
        if name == RuleName.HALVING:
            return [halving_rule(eps * 2 ** (t - r)) for r in range(1, t + 1)]
        return [two_proc_approx_rule(eps * 3 ** (t - r)) for r in range(1, t + 1)]
    if name == RuleName.TS_CONSENSUS:
        return [ts_consensus_rule()] * t
    if beta is None:
        raise RuleError("The leader rule needs the binary consensus inputs")
    return [leader_rule(beta)] * t


def rule_map(
    task: Task, model: ModelSpec, t: int, rules: Sequence[DecisionRule]
) -> SimplicialMap:
    """Materialize the decision map of composed per round rules.

    :param rules: rule of every round, the outputs of round r are the inputs of round r+1
    :return: map on the t-round protocol complex
    """
    if len(rules) != t:
        raise RuleError(f"Expected {t} round rules, got {len(rules)}")
    cache: dict[tuple[int, Value, int], Value] = {}

    def decide(pid: int, value: Value, depth: int) -> Value:
        if depth == 0:
            return value
        key = (pid, value, depth)
        if key not in cache:
            view = value.view
            inputs = {j: decide(j, seen, depth - 1) for j, seen in view.seen}
            try:
                cache[key] = rules[depth - 1](pid, View.of(inputs, view.box_output))
            except (KeyError, TypeError, ValueError) as err:
                raise PartialRuleError(
                    f"Rule {rules[depth - 1].name} undefined on {view.label()}"
                ) from err
        return cache[key]

    protocol = protocol_complex(task.inputs, model, t)
    return SimplicialMap(
        {v: Vertex(v.pid, decide(v.pid, v.value, t)) for v in protocol.vertices}
    )


def run_rule(
    task: Task, model: ModelSpec, t: int, rules: Sequence[DecisionRule]
) -> bool:
    """Return True if the composed rules solve ``task`` in ``t`` rounds."""
    verdict = verify_map(task, model, t, rule_map(task, model, t, rules))
    _LOGGER.debug(
        "Rules %s on %s in %s rounds: %s",
        ", ".join(r.name for r in rules),
        task.name,
        t,
        verdict,
    )
    return verdict


def _rounds_to_reach(base: int, eps: Fraction) -> int:
    """Smallest k with base**k * eps >= 1."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    rounds, reach = 0, eps
    while reach < 1:
        rounds += 1
        reach *= base
    return rounds


def approx_round_lower_bound(n: int, eps: Fraction) -> int:
    """Rounds needed for eps-approximate agreement in the wait-free iterated model."""
    return _rounds_to_reach(3 if n == 2 else 2, eps)


def bc_round_lower_bound(n: int, eps: Fraction) -> int:
    """Rounds needed for eps-approximate agreement when binary consensus is available."""
    return min(_rounds_to_reach(2, eps), _rounds_to_reach(2, Fraction(1, n)) - 1)
