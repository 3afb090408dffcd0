from dataclasses import replace
from fractions import Fraction
import unittest

import pytest

from pyspeedup.closure import (
    ClosureEngine,
    candidate_sets,
    closure,
    closure_beta,
    is_fixed_point,
    local_task,
    lower_bound_chain,
    majority_side,
    speedup_transform,
    zero_round_solvable,
)
from pyspeedup.complex import Simplex, Value, Vertex
from pyspeedup.const import Communication
from pyspeedup.exceptions import (
    IdMismatchError,
    ModelError,
    NotASolutionError,
    NotInTargetError,
    StepBudgetExceededError,
)
from pyspeedup.models import ModelSpec, protocol_complex
from pyspeedup.rules import approx_round_lower_bound
from pyspeedup.solver import SimplicialMap, solve, verify_map
from pyspeedup.tasks import approx_agreement, binary_consensus, tasks_equal


def bits(*values):
    return Simplex.from_values({pid: Value.bit(v) for pid, v in enumerate(values, start=1)})


class TestLocalTask(unittest.TestCase):

    def test_local_task(self):
        task = binary_consensus(2)
        local = local_task(task, bits(0, 1), bits(0, 1))
        self.assertEqual(local.task.images(bits(0)), frozenset({bits(0)}))
        self.assertEqual(local.task.images(bits(0, 1)), task.images(bits(0, 1)))
        self.assertEqual(len(local.target.facets), 2)

    def test_local_task_errors(self):
        task = binary_consensus(2)
        with self.assertRaises(IdMismatchError):
            local_task(task, bits(0, 1), bits(0))
        with self.assertRaises(NotInTargetError):
            local_task(task, bits(0, 0), bits(0, 1))

    def test_candidate_sets(self):
        images = binary_consensus(2).images(bits(0, 1))
        self.assertEqual(len(candidate_sets(images)), 4)

    def test_empty_images(self):
        task = binary_consensus(2)
        task = replace(task, delta={**task.delta, bits(0, 1): frozenset()})
        self.assertEqual(candidate_sets(task.images(bits(0, 1))), [])
        with self.assertRaises(NotInTargetError):
            local_task(task, bits(0, 1), bits(0, 1))

    def test_majority_side(self):
        self.assertEqual(majority_side({1: 0, 2: 1}), (0, frozenset({1})))
        self.assertEqual(majority_side({1: 1, 2: 1, 3: 0}), (1, frozenset({1, 2})))


class TestClosureEngine(unittest.IsolatedAsyncioTestCase):

    async def test_consensus_is_a_fixed_point(self):
        engine = ClosureEngine(ModelSpec.iis(), threads=2)
        self.assertTrue(await engine.is_fixed_point(binary_consensus(2)))

    async def test_two_process_approx_triples(self):
        engine = ClosureEngine(ModelSpec.iis(), threads=4)
        closed = await engine.closure(approx_agreement(2, 4, 1))
        self.assertTrue(tasks_equal(closed, approx_agreement(2, 4, 3)))
        self.assertFalse(await engine.is_fixed_point(approx_agreement(2, 4, 1)))

    async def test_test_and_set_closes_consensus(self):
        closed = await ClosureEngine(ModelSpec.test_and_set()).closure(binary_consensus(2))
        self.assertEqual(len(closed.images(bits(0, 1))), 4)
        self.assertTrue(zero_round_solvable(closed, ModelSpec.test_and_set()))

    async def test_existential_box_inputs(self):
        engine = ClosureEngine(ModelSpec.binary_consensus())
        self.assertFalse(await engine.is_fixed_point(binary_consensus(2)))

    async def test_empty_images_stay_empty(self):
        task = binary_consensus(2)
        task = replace(task, delta={**task.delta, bits(0, 1): frozenset()}, family=None)
        self.assertFalse(solve(task, ModelSpec.iis(), 1).solvable)
        engine = ClosureEngine(ModelSpec.iis())
        closed = await engine.closure(task)
        self.assertEqual(closed.images(bits(0, 1)), frozenset())
        self.assertEqual(closed.images(bits(1, 1)), task.images(bits(1, 1)))
        self.assertTrue(await engine.is_fixed_point(task))

    async def test_weaker_communication_closes_less(self):
        task = approx_agreement(2, 4, 1)
        wait_free = await ClosureEngine(ModelSpec.iis()).closure(task)
        for comm in (Communication.SNAPSHOT, Communication.COLLECT):
            with self.subTest(comm=comm):
                closed = await ClosureEngine(ModelSpec(comm=comm)).closure(task)
                for sigma in task.inputs.ordered_simplices():
                    self.assertLessEqual(task.images(sigma), closed.images(sigma))
                    self.assertLessEqual(closed.images(sigma), wait_free.images(sigma))

    async def test_pinned_box_inputs_need_binary_consensus(self):
        with self.assertRaises(ModelError):
            ClosureEngine(ModelSpec.iis(), beta={1: 0})

    async def test_fixed_point_chain(self):
        engine = ClosureEngine(ModelSpec.iis())
        with self.assertLogs("pyspeedup.closure", level="WARNING"):
            bound = await engine.lower_bound_chain(binary_consensus(2), max_steps=3)
        self.assertEqual(bound, 3)

    async def test_family_chain(self):
        engine = ClosureEngine(ModelSpec.iis(), threads=4)
        task = approx_agreement(2, 4, 1)
        bound = await engine.lower_bound_chain(task, engine.family_transform(3))
        self.assertEqual(bound, 2)
        self.assertEqual(bound, approx_round_lower_bound(2, Fraction(1, 4)))

    async def test_step_budget(self):
        engine = ClosureEngine(ModelSpec.iis())

        def widen(task):
            return approx_agreement(2, 8, task.family.eps_num + 1)

        with self.assertRaises(StepBudgetExceededError) as context:
            await engine.lower_bound_chain(approx_agreement(2, 8, 1), widen, max_steps=2)
        self.assertEqual(context.exception.max_steps, 2)

    async def test_custom_halt(self):
        engine = ClosureEngine(ModelSpec.iis())
        bound = await engine.lower_bound_chain(binary_consensus(2), halt=lambda task: True)
        self.assertEqual(bound, 0)


class TestSpeedup(unittest.TestCase):

    def test_speedup_solves_the_closure(self):
        task, model = binary_consensus(2), ModelSpec.test_and_set()
        witness = solve(task, model, 1).witness
        faster = speedup_transform(task, model, 1, witness)
        self.assertTrue(verify_map(closure(task, model), model, 0, faster))

    def test_speedup_of_two_process_approx(self):
        task, model = approx_agreement(2, 3, 1), ModelSpec.iis()
        witness = solve(task, model, 1).witness
        faster = speedup_transform(task, model, 1, witness)
        self.assertTrue(verify_map(approx_agreement(2, 3, 3), model, 0, faster))

    @pytest.mark.slow
    def test_speedup_over_two_rounds(self):
        task, model = approx_agreement(2, 9, 1), ModelSpec.iis()
        witness = solve(task, model, 2).witness
        faster = speedup_transform(task, model, 2, witness)
        self.assertTrue(verify_map(approx_agreement(2, 9, 3), model, 1, faster))

    def test_rejects_non_solutions(self):
        task, model = binary_consensus(2), ModelSpec.iis()
        protocol = protocol_complex(task.inputs, model, 1)
        own = SimplicialMap(
            {v: Vertex(v.pid, v.value.view.get(v.pid)) for v in protocol.vertices}
        )
        with self.assertRaises(NotASolutionError):
            speedup_transform(task, model, 1, own)
        with self.assertRaises(ValueError):
            speedup_transform(task, model, 0, own)


class TestSyncWrappers(unittest.TestCase):

    def test_closure_beta(self):
        task = binary_consensus(2)
        self.assertTrue(tasks_equal(closure_beta(task, {1: 0, 2: 0}), task))
        with self.assertRaises(ModelError):
            closure_beta(task, {1: 0})

    def test_is_fixed_point(self):
        self.assertTrue(is_fixed_point(binary_consensus(2), ModelSpec.iis()))

    @pytest.mark.slow
    def test_three_process_chain(self):
        bound = lower_bound_chain(approx_agreement(3, 4, 1), ModelSpec.iis(), threads=4)
        self.assertEqual(bound, 2)


if __name__ == "__main__":
    unittest.main()
