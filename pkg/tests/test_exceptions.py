import unittest

from pyspeedup.exceptions import (
    BadGridError,
    ComplexError,
    DocumentError,
    IdMismatchError,
    MissingPeerValueError,
    ModelError,
    NonChromaticError,
    PyspeedupError,
    ResourceLimitError,
    RuleError,
    SolverError,
    StepBudgetExceededError,
    TaskError,
    UnsupportedCombinationError,
)


class TestPyspeedupExceptions(unittest.TestCase):

    def test_pyspeedup_error(self):
        with self.assertRaises(PyspeedupError):
            raise PyspeedupError("General error")

    def test_non_chromatic_error(self):
        with self.assertRaises(ComplexError) as context:
            raise NonChromaticError(3)
        self.assertEqual(context.exception.pid, 3)
        self.assertIn("Process id 3 appears twice", context.exception.message)

    def test_unsupported_combination_error(self):
        with self.assertRaises(ModelError) as context:
            raise UnsupportedCombinationError("collect", "bc")
        self.assertEqual(context.exception.comm, "collect")
        self.assertIn("'bc' is only supported with immediate snapshot", str(context.exception))

    def test_id_mismatch_error(self):
        self.assertTrue(issubclass(IdMismatchError, ModelError))

    def test_resource_limit_error(self):
        with self.assertRaises(SolverError) as context:
            raise ResourceLimitError(100, 101)
        self.assertEqual((context.exception.budget, context.exception.explored), (100, 101))
        self.assertEqual(context.exception.message, "Search budget 100 exceeded after 101 nodes")

    def test_step_budget_exceeded_error(self):
        with self.assertRaises(PyspeedupError) as context:
            raise StepBudgetExceededError(8)
        self.assertEqual(context.exception.max_steps, 8)

    def test_hierarchy(self):
        self.assertTrue(issubclass(BadGridError, TaskError))
        self.assertTrue(issubclass(MissingPeerValueError, RuleError))
        self.assertTrue(issubclass(DocumentError, PyspeedupError))


if __name__ == "__main__":
    unittest.main()
