import unittest
from fractions import Fraction

from hypothesis import given, strategies as st

from pyspeedup.complex import (
    Simplex,
    Value,
    Vertex,
    View,
    complex_from_document,
    complex_to_document,
    faces,
    make_complex,
    parse_complex,
    project,
    to_dot,
    value_from_json,
)
from pyspeedup.exceptions import (
    BadGridError,
    DocumentError,
    EmptyComplexError,
    EmptyResultError,
    NonChromaticError,
)
from pyspeedup.utils import dump_json


def edge(a, b, m=2):
    return Simplex.of([Vertex(1, Value.rational(a, m)), Vertex(2, Value.rational(b, m))])


rows = st.dictionaries(st.integers(1, 3), st.integers(0, 2), min_size=1)


class TestValue(unittest.TestCase):

    def test_rational_equality(self):
        self.assertEqual(Value.rational(1, 2), Value.from_fraction(Fraction(1, 2), 2))
        self.assertEqual(hash(Value.rational(1, 2)), hash(Value.rational(1, 2)))
        self.assertNotEqual(Value.rational(1, 2), Value.bit(1))

    def test_rational_order_follows_numbers(self):
        values = [Value.rational(k, 4) for k in (3, 0, 4, 1)]
        self.assertEqual([v.payload[0] for v in sorted(values)], [0, 1, 3, 4])

    def test_bad_values(self):
        with self.assertRaises(BadGridError):
            Value.rational(3, 2)
        with self.assertRaises(BadGridError):
            Value.from_fraction(Fraction(1, 3), 2)
        with self.assertRaises(ValueError):
            Value.bit(2)
        with self.assertRaises(TypeError):
            _ = Value.symbol("x").fraction

    def test_views_are_canonical(self):
        a = View.of({2: Value.bit(1), 1: Value.bit(0)}, 1)
        b = View.of({1: Value.bit(0), 2: Value.bit(1)}, 1)
        self.assertEqual(a, b)
        self.assertEqual(Value.nested(a), Value.nested(b))
        self.assertNotEqual(a, View.of({1: Value.bit(0), 2: Value.bit(1)}, 0))
        self.assertEqual(a.ids, frozenset({1, 2}))
        self.assertEqual(a.get(2), Value.bit(1))
        self.assertIsNone(a.get(3))
        self.assertEqual(a.label(), "(1|{1:0,2:1})")

    def test_json_errors(self):
        with self.assertRaises(DocumentError):
            value_from_json(["q", 1])
        with self.assertRaises(DocumentError):
            value_from_json({"z": 1})
        with self.assertRaises(DocumentError):
            value_from_json({"q": [3, 2]})


class TestSimplex(unittest.TestCase):

    def test_sorted_by_pid(self):
        simplex = Simplex.of([Vertex(2, Value.bit(0)), Vertex(1, Value.bit(1))])
        self.assertEqual(simplex.pids, (1, 2))
        self.assertEqual(simplex.dimension, 1)
        self.assertEqual(simplex.value_of(2), Value.bit(0))

    def test_chromatic_invariant(self):
        with self.assertRaises(NonChromaticError) as context:
            Simplex.of([Vertex(1, Value.bit(0)), Vertex(1, Value.bit(1))])
        self.assertEqual(context.exception.pid, 1)
        with self.assertRaises(EmptyComplexError):
            Simplex(())

    def test_faces(self):
        triangle = Simplex.from_values({pid: Value.bit(0) for pid in (1, 2, 3)})
        self.assertEqual(len(faces(triangle)), 7)
        self.assertEqual(triangle.project([1, 3]).pids, (1, 3))
        self.assertIsNone(triangle.project([4]))


class TestChromaticComplex(unittest.TestCase):

    def test_keeps_maximal_facets(self):
        complex_ = make_complex([edge(0, 1), edge(0, 1).project([1]), edge(1, 1)])
        self.assertEqual(len(complex_.facets), 2)
        self.assertIn(edge(0, 1).project([2]), complex_)
        self.assertEqual(len(complex_.vertices_of(1)), 2)

    def test_empty_complex(self):
        with self.assertRaises(EmptyComplexError):
            make_complex([])

    def test_project(self):
        complex_ = make_complex([edge(0, 1), edge(1, 2)])
        self.assertEqual(project(complex_, [2]).ids, frozenset({2}))
        self.assertEqual(len(project(complex_, [1]).facets), 2)
        with self.assertRaises(EmptyResultError):
            project(complex_, [3])

    def test_document(self):
        complex_ = make_complex([edge(0, 1), edge(2, 1)])
        doc = complex_to_document(complex_, 3)
        self.assertEqual(doc.n, 3)
        self.assertEqual(complex_from_document(doc), complex_)
        self.assertEqual(parse_complex(dump_json(doc)), complex_)
        with self.assertRaises(DocumentError):
            parse_complex('{"n": 0, "facets": []}')

    def test_to_dot(self):
        source = to_dot(make_complex([edge(0, 1)]), "sample")
        self.assertTrue(source.startswith("graph sample {"))
        self.assertIn("v0 -- v1", source)
        self.assertIn('"1:0/2"', source)

    @given(st.lists(rows, min_size=1, max_size=8))
    def test_make_complex_is_canonical(self, data):
        simplices = [
            Simplex.from_values({pid: Value.rational(v, 2) for pid, v in row.items()})
            for row in data
        ]
        complex_ = make_complex(simplices)
        self.assertEqual(complex_, make_complex(reversed(simplices)))
        for simplex in simplices:
            self.assertIn(simplex, complex_)
        for a in complex_.facets:
            for b in complex_.facets:
                self.assertTrue(a == b or not a.issubset(b))
        self.assertEqual(make_complex(complex_.facets), complex_)

    @given(
        st.lists(rows, min_size=1, max_size=6),
        st.sets(st.integers(1, 3), min_size=1),
        st.sets(st.integers(1, 3), min_size=1),
    )
    def test_projections_compose(self, data, first, second):
        complex_ = make_complex(
            Simplex.from_values({pid: Value.rational(v, 2) for pid, v in row.items()})
            for row in data
        )
        both = first & second
        if not both & complex_.ids:
            return
        self.assertEqual(project(project(complex_, first), second), project(complex_, both))

    @given(rows)
    def test_faces_are_monotone(self, row):
        simplex = Simplex.from_values({pid: Value.rational(v, 2) for pid, v in row.items()})
        for face in faces(simplex):
            self.assertTrue(face.issubset(simplex))
            self.assertLessEqual(faces(face), faces(simplex))


if __name__ == "__main__":
    unittest.main()
