"""Chromatic simplicial complexes for pyspeedup."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
import logging
import struct
from typing import Any

import graphviz
from pydantic import ValidationError

from pyspeedup.const import BIT_TAG, RATIONAL_TAG, SYMBOL_TAG, VIEW_TAG
from pyspeedup.containers import ComplexDocument, VertexDocument
from pyspeedup.exceptions import (
    BadGridError,
    DocumentError,
    EmptyComplexError,
    EmptyResultError,
    NonChromaticError,
)

_LOGGER = logging.getLogger(__name__)

_UINT = struct.Struct(">I")
_UINT_PAIR = struct.Struct(">II")


@dataclass(frozen=True, slots=True, eq=False)
class Value:
    """Canonical term carried by a vertex.
    Values compare and hash by their canonical byte encoding, so two equal
    terms built along different paths are the same value.
    """

    kind: str
    payload: Any
    encoding: bytes = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """Compute the canonical encoding."""
        if self.kind == RATIONAL_TAG:
            num, m = self.payload
            # denominator first: rationals sharing a grid sort numerically
            enc = b"q" + _UINT_PAIR.pack(m, num)
        elif self.kind == BIT_TAG:
            enc = b"b" + bytes([self.payload])
        elif self.kind == SYMBOL_TAG:
            raw = self.payload.encode()
            enc = b"s" + _UINT.pack(len(raw)) + raw
        elif self.kind == VIEW_TAG:
            enc = b"v" + self.payload.encoding
        else:
            raise ValueError(f"Unknown value kind '{self.kind}'")
        object.__setattr__(self, "encoding", enc)

    @classmethod
    def rational(cls, num: int, m: int) -> Value:
        """Grid value num/m with 0 <= num <= m."""
        if m <= 0 or not 0 <= num <= m:
            raise BadGridError(f"{num}/{m} is not a point of the 1/{m} grid")
        return cls(RATIONAL_TAG, (num, m))

    @classmethod
    def from_fraction(cls, value: Fraction, m: int) -> Value:
        """Grid value equal to the fraction ``value`` on the 1/m grid."""
        scaled = value * m
        if scaled.denominator != 1:
            raise BadGridError(f"{value} is not a point of the 1/{m} grid")
        return cls.rational(int(scaled), m)

    @classmethod
    def bit(cls, bit: int) -> Value:
        """Binary value."""
        if bit not in (0, 1):
            raise ValueError(f"Not a bit: {bit}")
        return cls(BIT_TAG, bit)

    @classmethod
    def symbol(cls, text: str) -> Value:
        """Opaque symbolic value."""
        return cls(SYMBOL_TAG, text)

    @classmethod
    def nested(cls, view: View) -> Value:
        """Value holding a full information view."""
        return cls(VIEW_TAG, view)

    @property
    def is_rational(self) -> bool:
        """Return True for grid values."""
        return self.kind == RATIONAL_TAG

    @property
    def fraction(self) -> Fraction:
        """Grid value as a fraction."""
        if self.kind == RATIONAL_TAG:
            num, m = self.payload
            return Fraction(num, m)
        if self.kind == BIT_TAG:
            return Fraction(self.payload)
        raise TypeError(f"Value of kind '{self.kind}' has no numeric reading")

    @property
    def view(self) -> View:
        """Nested view."""
        if self.kind != VIEW_TAG:
            raise TypeError(f"Value of kind '{self.kind}' is not a view")
        return self.payload

    def label(self) -> str:
        """Short human readable form."""
        if self.kind == RATIONAL_TAG:
            num, m = self.payload
            return f"{num}/{m}"
        if self.kind == VIEW_TAG:
            return self.payload.label()
        return str(self.payload)

    def __eq__(self, other: object) -> bool:
        """Compare canonical encodings."""
        if not isinstance(other, Value):
            return NotImplemented
        return self.encoding == other.encoding

    def __lt__(self, other: Value) -> bool:
        """Order by canonical encoding."""
        return self.encoding < other.encoding

    def __hash__(self) -> int:
        """Hash the canonical encoding."""
        return hash(self.encoding)


@dataclass(frozen=True, slots=True, eq=False)
class View:
    """Full information view after one round.
    ``seen`` maps every process whose round value was read to that value,
    sorted by process id. ``box_output`` is the black box answer of the round
    and stays None for models without a box.
    """

    seen: tuple[tuple[int, Value], ...]
    box_output: int | None = None
    encoding: bytes = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """Compute the canonical encoding."""
        parts = [b"\x00" if self.box_output is None else bytes([1, self.box_output])]
        parts.append(_UINT.pack(len(self.seen)))
        for pid, value in self.seen:
            parts.extend((_UINT_PAIR.pack(pid, len(value.encoding)), value.encoding))
        object.__setattr__(self, "encoding", b"".join(parts))

    @classmethod
    def of(cls, seen: Mapping[int, Value], box_output: int | None = None) -> View:
        """Build a view from an unordered mapping."""
        return cls(tuple(sorted(seen.items())), box_output)

    @property
    def ids(self) -> frozenset[int]:
        """Process ids read in the round."""
        return frozenset(pid for pid, _ in self.seen)

    def get(self, pid: int) -> Value | None:
        """Value read from process ``pid``, if any."""
        for seen_pid, value in self.seen:
            if seen_pid == pid:
                return value
        return None

    def as_dict(self) -> dict[int, Value]:
        """Seen values keyed by process id."""
        return dict(self.seen)

    def label(self) -> str:
        """Short human readable form."""
        inner = ",".join(f"{pid}:{value.label()}" for pid, value in self.seen)
        if self.box_output is None:
            return f"{{{inner}}}"
        return f"({self.box_output}|{{{inner}}})"

    def __eq__(self, other: object) -> bool:
        """Compare canonical encodings."""
        if not isinstance(other, View):
            return NotImplemented
        return self.encoding == other.encoding

    def __hash__(self) -> int:
        """Hash the canonical encoding."""
        return hash(self.encoding)


@dataclass(frozen=True, slots=True, order=True)
class Vertex:
    """Colored vertex (process id, value)."""

    pid: int
    value: Value

    def label(self) -> str:
        """Return the ``id:value`` label."""
        return f"{self.pid}:{self.value.label()}"


@dataclass(frozen=True, slots=True)
class Simplex:
    """Non empty chromatic simplex, vertices sorted by process id."""

    vertices: tuple[Vertex, ...]

    def __post_init__(self) -> None:
        """Check the chromatic invariant."""
        if not self.vertices:
            raise EmptyComplexError("A simplex needs at least one vertex")
        previous = -1
        for vertex in self.vertices:
            if vertex.pid == previous:
                raise NonChromaticError(vertex.pid)
            if vertex.pid < previous:
                raise ValueError("Simplex vertices must be sorted by process id")
            previous = vertex.pid

    @classmethod
    def of(cls, vertices: Iterable[Vertex]) -> Simplex:
        """Build a simplex from vertices in any order."""
        ordered = sorted(vertices, key=lambda v: v.pid)
        for left, right in zip(ordered, ordered[1:], strict=False):
            if left.pid == right.pid:
                raise NonChromaticError(left.pid)
        return cls(tuple(ordered))

    @classmethod
    def from_values(cls, values: Mapping[int, Value]) -> Simplex:
        """Build a simplex from a process id -> value mapping."""
        return cls(tuple(Vertex(pid, values[pid]) for pid in sorted(values)))

    @property
    def ids(self) -> frozenset[int]:
        """Color set of the simplex."""
        return frozenset(v.pid for v in self.vertices)

    @property
    def pids(self) -> tuple[int, ...]:
        """Process ids in ascending order."""
        return tuple(v.pid for v in self.vertices)

    @property
    def dimension(self) -> int:
        """Dimension, one less than the vertex count."""
        return len(self.vertices) - 1

    def value_of(self, pid: int) -> Value | None:
        """Value of the vertex colored ``pid``."""
        for vertex in self.vertices:
            if vertex.pid == pid:
                return vertex.value
        return None

    def values(self) -> dict[int, Value]:
        """Values keyed by process id."""
        return {v.pid: v.value for v in self.vertices}

    def project(self, pids: Iterable[int]) -> Simplex | None:
        """Face colored by ``pids``, or None when no vertex is kept."""
        keep = set(pids)
        kept = tuple(v for v in self.vertices if v.pid in keep)
        return Simplex(kept) if kept else None

    def issubset(self, other: Simplex) -> bool:
        """Return True if every vertex of self is a vertex of other."""
        if len(self.vertices) > len(other.vertices):
            return False
        return set(self.vertices) <= set(other.vertices)

    def sort_key(self) -> tuple[tuple[int, ...], tuple[bytes, ...]]:
        """Canonical ordering key (id set, value encodings)."""
        return self.pids, tuple(v.value.encoding for v in self.vertices)

    def label(self) -> str:
        """Return a human readable form."""
        return "{" + ", ".join(v.label() for v in self.vertices) + "}"

    def __iter__(self) -> Iterator[Vertex]:
        """Iterate vertices in process id order."""
        return iter(self.vertices)

    def __len__(self) -> int:
        """Vertex count."""
        return len(self.vertices)

    def __contains__(self, vertex: object) -> bool:
        """Vertex membership."""
        return vertex in self.vertices


def ids(simplex: Simplex) -> frozenset[int]:
    """Return the set of process ids of a simplex."""
    return simplex.ids


def faces(simplex: Simplex) -> frozenset[Simplex]:
    """Return all non empty faces of a simplex, itself included."""
    return frozenset(
        Simplex(combo)
        for size in range(1, len(simplex) + 1)
        for combo in combinations(simplex.vertices, size)
    )


@dataclass(frozen=True)
class ChromaticComplex:
    """Chromatic complex stored by its maximal facets in canonical order.
    Faces are generated on demand; build instances with ``make_complex``.
    """

    facets: tuple[Simplex, ...]

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        """All vertices in canonical order."""
        return tuple(sorted({v for facet in self.facets for v in facet}))

    @cached_property
    def simplices(self) -> frozenset[Simplex]:
        """Every simplex of the complex."""
        return frozenset(face for facet in self.facets for face in faces(facet))

    @cached_property
    def ids(self) -> frozenset[int]:
        """Process ids used by the complex."""
        return frozenset(v.pid for v in self.vertices)

    def ordered_simplices(self) -> list[Simplex]:
        """Every simplex of the complex in canonical order."""
        return sorted(self.simplices, key=Simplex.sort_key)

    def vertices_of(self, pid: int) -> tuple[Vertex, ...]:
        """Vertices colored ``pid`` in canonical order."""
        return tuple(v for v in self.vertices if v.pid == pid)

    def __contains__(self, simplex: object) -> bool:
        """Simplex membership, faces included."""
        return simplex in self.simplices

    def __iter__(self) -> Iterator[Simplex]:
        """Iterate facets in canonical order."""
        return iter(self.facets)

    def __len__(self) -> int:
        """Facet count."""
        return len(self.facets)


def make_complex(facets: Iterable[Simplex | Iterable[Vertex]]) -> ChromaticComplex:
    """Build a complex from candidate facets.

    :param facets: simplices, or plain vertex collections
    :return: the complex holding the subset maximal candidates in canonical order
    """
    candidates = {
        item if isinstance(item, Simplex) else Simplex.of(item) for item in facets
    }
    if not candidates:
        raise EmptyComplexError("A complex needs at least one facet")

    by_vertex: dict[Vertex, list[frozenset[Vertex]]] = {}
    kept: list[Simplex] = []
    for candidate in sorted(candidates, key=len, reverse=True):
        members = frozenset(candidate.vertices)
        owners = by_vertex.get(candidate.vertices[0], [])
        if any(len(owner) > len(members) and members <= owner for owner in owners):
            continue
        kept.append(candidate)
        for vertex in candidate.vertices:
            by_vertex.setdefault(vertex, []).append(members)
    kept.sort(key=Simplex.sort_key)
    return ChromaticComplex(tuple(kept))


def project(k: ChromaticComplex, pids: Iterable[int]) -> ChromaticComplex:
    """Return the subcomplex induced by the vertices colored in ``pids``."""
    keep = frozenset(pids)
    if not keep:
        raise ValueError("Projection needs a non empty id set")
    parts = [face for facet in k.facets if (face := facet.project(keep)) is not None]
    if not parts:
        raise EmptyResultError(f"No vertex of the complex has an id in {sorted(keep)}")
    return make_complex(parts)


def complexes_equal(a: ChromaticComplex, b: ChromaticComplex) -> bool:
    """Return True if both complexes have the same facets."""
    return a.facets == b.facets


def value_to_json(value: Value) -> Any:
    """Encode a value as a tagged JSON term."""
    if value.kind == RATIONAL_TAG:
        return {RATIONAL_TAG: list(value.payload)}
    if value.kind == VIEW_TAG:
        view = value.payload
        return {
            VIEW_TAG: {
                "box": view.box_output,
                "seen": [[pid, value_to_json(seen)] for pid, seen in view.seen],
            }
        }
    return {value.kind: value.payload}


def value_from_json(data: Any) -> Value:
    """Decode a tagged JSON term."""
    if not isinstance(data, dict) or len(data) != 1:
        raise DocumentError(f"Malformed value: {data!r}")
    ((tag, body),) = data.items()
    try:
        if tag == RATIONAL_TAG:
            num, m = body
            return Value.rational(int(num), int(m))
        if tag == BIT_TAG:
            return Value.bit(int(body))
        if tag == SYMBOL_TAG:
            return Value.symbol(str(body))
        if tag == VIEW_TAG:
            seen = {int(pid): value_from_json(inner) for pid, inner in body["seen"]}
            return Value.nested(View.of(seen, body.get("box")))
    except (TypeError, ValueError, KeyError, BadGridError) as err:
        raise DocumentError(f"Malformed value: {data!r}") from err
    raise DocumentError(f"Unknown value tag '{tag}'")


def vertex_to_document(vertex: Vertex) -> VertexDocument:
    """Encode a vertex."""
    return VertexDocument(id=vertex.pid, value=value_to_json(vertex.value))


def vertex_from_document(doc: VertexDocument) -> Vertex:
    """Decode a vertex."""
    return Vertex(doc.id, value_from_json(doc.value))


def simplex_to_documents(simplex: Simplex) -> list[VertexDocument]:
    """Encode a simplex as its vertex list."""
    return [vertex_to_document(v) for v in simplex]


def simplex_from_documents(docs: Iterable[VertexDocument]) -> Simplex:
    """Decode a vertex list into a simplex."""
    return Simplex.of(vertex_from_document(doc) for doc in docs)


def complex_to_document(k: ChromaticComplex, n: int | None = None) -> ComplexDocument:
    """Encode a complex, ``n`` defaults to its largest process id."""
    return ComplexDocument(
        n=n if n is not None else max(k.ids),
        facets=[simplex_to_documents(facet) for facet in k.facets],
    )


def complex_from_document(doc: ComplexDocument) -> ChromaticComplex:
    """Decode a complex document."""
    complex_ = make_complex(simplex_from_documents(facet) for facet in doc.facets)
    if max(complex_.ids) > doc.n:
        raise DocumentError(f"Process id above n={doc.n} in complex document")
    return complex_


def parse_complex(text: str) -> ChromaticComplex:
    """Parse a complex from its JSON text."""
    try:
        doc = ComplexDocument.model_validate_json(text)
    except ValidationError as err:
        raise DocumentError(f"Invalid complex document: {err}") from err
    return complex_from_document(doc)


def to_dot(k: ChromaticComplex, name: str = "complex") -> str:
    """Return the DOT source of the 1-skeleton of a complex."""
    graph = graphviz.Graph(name=name, node_attr={"shape": "circle"})
    index = {vertex: f"v{i}" for i, vertex in enumerate(k.vertices)}
    for vertex, node in index.items():
        graph.node(node, label=vertex.label())
    edges = sorted(
        {
            (index[a], index[b])
            for facet in k.facets
            for a, b in combinations(facet.vertices, 2)
        },
        key=lambda edge: (int(edge[0][1:]), int(edge[1][1:])),
    )
    for left, right in edges:
        graph.edge(left, right)
    _LOGGER.debug("DOT export: %s vertices, %s edges", len(index), len(edges))
    return graph.source
