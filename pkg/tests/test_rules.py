from fractions import Fraction
import unittest

from hypothesis import given, strategies as st
import pytest

from pyspeedup.complex import Value, View
from pyspeedup.const import RuleName
from pyspeedup.exceptions import MissingPeerValueError, PartialRuleError, RuleError
from pyspeedup.models import ModelSpec
from pyspeedup.rules import (
    approx_round_lower_bound,
    bc_round_lower_bound,
    halving_rule,
    leader_rule,
    rule_map,
    rule_schedule,
    run_rule,
    ts_consensus_rule,
    two_proc_approx_rule,
    two_proc_outputs,
)
from pyspeedup.tasks import approx_agreement, binary_consensus

fractions = st.fractions(min_value=0, max_value=1)


class TestRules(unittest.TestCase):

    def test_two_proc_outputs(self):
        third = Fraction(1, 3)
        self.assertEqual(two_proc_outputs(third, Fraction(0), Fraction(1)), (0, third, 2 * third, 1))
        with self.assertRaises(ValueError):
            two_proc_outputs(third, Fraction(1), Fraction(0))

    @given(fractions, fractions, st.fractions(min_value=Fraction(1, 100), max_value=1))
    def test_two_proc_adjacent_outputs_agree(self, a, b, eps):
        y1, y2 = sorted((a, b))
        if y2 - y1 > 3 * eps:
            return
        outputs = two_proc_outputs(eps, y1, y2)
        for left, right in zip(outputs, outputs[1:], strict=False):
            self.assertLessEqual(abs(right - left), eps)
        for value in outputs:
            self.assertTrue(y1 <= value <= y2)

    def test_halving(self):
        rule = halving_rule(Fraction(1, 4))
        view = View.of({1: Value.rational(0, 4), 2: Value.rational(4, 4)})
        self.assertEqual(rule(1, view), Value.rational(1, 4))
        with self.assertRaises(PartialRuleError):
            rule(1, View.of({1: Value.symbol("x")}))

    def test_two_proc_roles(self):
        rule = two_proc_approx_rule(Fraction(1, 3))
        view = View.of({1: Value.rational(3, 3), 2: Value.rational(0, 3)})
        self.assertEqual(rule(2, view), Value.rational(2, 3))
        self.assertEqual(rule(1, view), Value.rational(1, 3))
        self.assertEqual(rule(1, View.of({1: Value.rational(3, 3)})), Value.rational(3, 3))

    def test_ts_consensus_loser_needs_a_peer(self):
        rule = ts_consensus_rule()
        self.assertEqual(rule(1, View.of({1: Value.bit(0)}, 1)), Value.bit(0))
        with self.assertRaises(MissingPeerValueError):
            rule(1, View.of({1: Value.bit(0)}, 0))

    def test_leader(self):
        rule = leader_rule({1: 0, 2: 1})
        view = View.of({1: Value.bit(0), 2: Value.bit(1)}, 1)
        self.assertEqual(rule(1, view), Value.bit(1))
        with self.assertRaises(PartialRuleError):
            rule(1, View.of({1: Value.bit(0)}))


class TestRunRule(unittest.TestCase):

    def test_named_rules(self):
        cases = [
            (RuleName.HALVING, approx_agreement(3, 2, 1), ModelSpec.iis(), 1, None),
            (RuleName.TWO_PROC, approx_agreement(2, 3, 1), ModelSpec.iis(), 1, None),
            (RuleName.TWO_PROC, approx_agreement(2, 9, 1), ModelSpec.iis(), 2, None),
            (RuleName.TS_CONSENSUS, binary_consensus(2), ModelSpec.test_and_set(), 1, None),
            (
                RuleName.LEADER,
                binary_consensus(2),
                ModelSpec.binary_consensus({1: 0, 2: 1}),
                1,
                {1: 0, 2: 1},
            ),
        ]
        for name, task, model, t, beta in cases:
            with self.subTest(rule=name, task=task.name, t=t):
                self.assertTrue(run_rule(task, model, t, rule_schedule(name, task, t, beta)))

    def test_halving_is_too_slow_for_two_processes(self):
        task = approx_agreement(2, 3, 1)
        rules = rule_schedule(RuleName.HALVING, task, 1)
        self.assertFalse(run_rule(task, ModelSpec.iis(), 1, rules))

    @pytest.mark.slow
    def test_halving_two_rounds(self):
        task = approx_agreement(3, 4, 1)
        rules = rule_schedule(RuleName.HALVING, task, 2)
        self.assertTrue(run_rule(task, ModelSpec.iis(), 2, rules))

    def test_schedule_errors(self):
        with self.assertRaises(RuleError):
            rule_schedule(RuleName.HALVING, binary_consensus(2), 1)
        with self.assertRaises(RuleError):
            rule_schedule(RuleName.LEADER, binary_consensus(2), 1)
        with self.assertRaises(RuleError):
            rule_map(binary_consensus(2), ModelSpec.iis(), 2, [ts_consensus_rule()])

    def test_undefined_rule(self):
        rules = rule_schedule(RuleName.TS_CONSENSUS, binary_consensus(2), 1)
        with self.assertRaises(MissingPeerValueError):
            run_rule(binary_consensus(2), ModelSpec.iis(), 1, rules)


class TestBounds(unittest.TestCase):

    def test_approx_bounds(self):
        self.assertEqual(approx_round_lower_bound(2, Fraction(1, 9)), 2)
        self.assertEqual(approx_round_lower_bound(2, Fraction(1, 10)), 3)
        self.assertEqual(approx_round_lower_bound(3, Fraction(1, 4)), 2)
        self.assertEqual(approx_round_lower_bound(3, Fraction(1)), 0)
        with self.assertRaises(ValueError):
            approx_round_lower_bound(3, Fraction(0))

    def test_binary_consensus_bounds(self):
        self.assertEqual(bc_round_lower_bound(4, Fraction(1, 64)), 1)
        self.assertEqual(bc_round_lower_bound(64, Fraction(1, 4)), 2)


if __name__ == "__main__":
    unittest.main()
