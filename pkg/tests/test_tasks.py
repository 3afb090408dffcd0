import unittest

from pydantic import ValidationError

from pyspeedup.complex import Simplex, Value
from pyspeedup.const import TaskKind
from pyspeedup.containers import TaskDocument
from pyspeedup.exceptions import BadGridError, DocumentError, InputMismatchError, TaskError
from pyspeedup.tasks import (
    Task,
    TaskFamily,
    approx_agreement,
    binary_consensus,
    check_task,
    delta_table,
    first_difference,
    liberal_approx_agreement,
    parse_task,
    task_from_document,
    task_to_document,
    tasks_equal,
    weak_consensus,
)
from pyspeedup.utils import dump_json


def bits(**values):
    return Simplex.from_values({int(k[1:]): Value.bit(v) for k, v in values.items()})


def grid_point(num, m):
    return Value.rational(num, m)


class TestConsensus(unittest.TestCase):

    def setUp(self):
        self.task = binary_consensus(2)

    def test_shape(self):
        self.assertEqual(len(self.task.inputs.facets), 4)
        self.assertEqual(self.task.name, "consensus(n=2)")
        check_task(self.task)

    def test_delta(self):
        self.assertEqual(self.task.images(bits(p1=0)), frozenset({bits(p1=0)}))
        self.assertEqual(self.task.images(bits(p1=1, p2=1)), frozenset({bits(p1=1, p2=1)}))
        self.assertEqual(
            self.task.images(bits(p1=0, p2=1)),
            frozenset({bits(p1=0, p2=0), bits(p1=1, p2=1)}),
        )
        with self.assertRaises(TaskError):
            self.task.images(bits(p3=0))

    def test_weak_consensus_binds_from_three(self):
        task = weak_consensus(3)
        self.assertEqual(len(task.images(bits(p1=0, p2=1))), 4)
        self.assertEqual(len(task.images(bits(p1=0, p2=1, p3=1))), 2)

    def test_minimum_sizes(self):
        with self.assertRaises(TaskError):
            binary_consensus(1)
        with self.assertRaises(TaskError):
            weak_consensus(2)
        with self.assertRaises(TaskError):
            liberal_approx_agreement(2, 4, 1)


class TestApproxAgreement(unittest.TestCase):

    def test_delta_respects_bound(self):
        task = approx_agreement(2, 4, 1)
        sigma = Simplex.from_values({1: grid_point(0, 4), 2: grid_point(4, 4)})
        images = task.images(sigma)
        self.assertEqual(len(images), 13)
        for tau in images:
            a, b = (v.value.fraction for v in tau)
            self.assertLessEqual(abs(a - b), 0.25)

    def test_validity_range(self):
        task = approx_agreement(3, 4, 4)
        sigma = Simplex.from_values({1: grid_point(1, 4), 2: grid_point(2, 4)})
        self.assertEqual(len(task.images(sigma)), 4)

    def test_liberal_edges(self):
        task = liberal_approx_agreement(3, 2, 1)
        edge = Simplex.from_values({1: grid_point(0, 2), 2: grid_point(2, 2)})
        self.assertEqual(len(task.images(edge)), 9)
        triangle = Simplex.from_values({1: grid_point(0, 2), 2: grid_point(2, 2), 3: grid_point(0, 2)})
        for tau in task.images(triangle):
            nums = [v.value.payload[0] for v in tau]
            self.assertLessEqual(max(nums) - min(nums), 1)

    def test_bad_grid(self):
        with self.assertRaises(BadGridError):
            approx_agreement(2, 0, 1)
        with self.assertRaises(BadGridError):
            approx_agreement(2, 4, 0)

    def test_family_scaling(self):
        family = TaskFamily(TaskKind.APPROX, 2, 9, 1)
        self.assertEqual(family.scaled(3).eps_num, 3)
        self.assertEqual(family.scaled(3).label(), "approx(n=2, eps=3/9)")
        self.assertTrue(tasks_equal(family.scaled(3).build(), approx_agreement(2, 9, 3)))


class TestComparison(unittest.TestCase):

    def test_equal_tasks(self):
        self.assertTrue(tasks_equal(binary_consensus(2), binary_consensus(2)))

    def test_first_difference(self):
        strict = approx_agreement(2, 2, 1)
        vacuous = approx_agreement(2, 2, 2)
        sigma = first_difference(strict, vacuous)
        self.assertIsNotNone(sigma)
        self.assertEqual(len(sigma), 2)
        self.assertIsNone(first_difference(strict, vacuous, participants=[1]))

    def test_input_mismatch(self):
        with self.assertRaises(InputMismatchError):
            tasks_equal(binary_consensus(2), approx_agreement(2, 2, 1))


class TestDocuments(unittest.TestCase):

    def test_family_document(self):
        doc = task_to_document(approx_agreement(2, 3, 1))
        self.assertEqual((doc.kind, doc.n, doc.m, doc.eps_num), (TaskKind.APPROX, 2, 3, 1))
        self.assertIsNone(doc.delta)

    def test_custom_document(self):
        named = binary_consensus(2)
        custom = Task(named.inputs, named.outputs, named.delta)
        doc = task_to_document(custom)
        self.assertEqual(doc.kind, TaskKind.CUSTOM)
        self.assertEqual(len(doc.delta), len(named.inputs.simplices))
        self.assertTrue(tasks_equal(task_from_document(doc), named))
        self.assertTrue(tasks_equal(parse_task(dump_json(doc)), named))

    def test_missing_fields(self):
        with self.assertRaises(ValidationError):
            TaskDocument(kind=TaskKind.APPROX, n=2)
        with self.assertRaises(ValidationError):
            TaskDocument(kind=TaskKind.CUSTOM, n=2)
        with self.assertRaises(DocumentError):
            parse_task('{"kind": "consensus"}')

    def test_delta_table(self):
        table = delta_table(binary_consensus(2))
        lines = table.splitlines()
        self.assertEqual(lines[0], "# consensus(n=2)")
        self.assertEqual(len(lines), 1 + 8)
        self.assertIn("{1:0, 2:1} -> {1:0, 2:0} | {1:1, 2:1}", table)


if __name__ == "__main__":
    unittest.main()
