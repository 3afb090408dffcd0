"""Iterated shared memory models and their protocol complexes."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
import logging

from pydantic import BaseModel, ConfigDict, Field, field_validator

from pyspeedup.complex import (
    ChromaticComplex,
    Simplex,
    Value,
    Vertex,
    View,
    make_complex,
)
from pyspeedup.const import ANY_ROUND, BlackBox, Communication
from pyspeedup.exceptions import (
    IdMismatchError,
    ModelError,
    UnsupportedCombinationError,
)

_LOGGER = logging.getLogger(__name__)

# process id -> ids whose round value it read
ViewAssignment = frozenset[tuple[int, frozenset[int]]]


class ModelSpec(BaseModel):
    """Dataclass for an execution model.
    ``bc_inputs`` gives the binary consensus box input of each process per
    round; the round key 0 is the default for every round not listed.
    """

    model_config = ConfigDict(frozen=True)

    comm: Communication = Communication.IMMEDIATE_SNAPSHOT
    box: BlackBox = BlackBox.NONE
    bc_inputs: dict[int, dict[int, int]] = Field(default_factory=dict)

    @field_validator("bc_inputs")
    @classmethod
    def check_bits(cls, value: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
        """Box inputs are bits."""
        for pid, rounds in value.items():
            if any(bit not in (0, 1) for bit in rounds.values()):
                raise ValueError(f"Box inputs of process {pid} must be 0 or 1")
        return value

    @classmethod
    def iis(cls) -> ModelSpec:
        """Plain iterated immediate snapshot."""
        return cls()

    @classmethod
    def test_and_set(cls) -> ModelSpec:
        """Immediate snapshot augmented with test&set."""
        return cls(box=BlackBox.TEST_AND_SET)

    @classmethod
    def binary_consensus(cls, beta: Mapping[int, int] | None = None) -> ModelSpec:
        """Immediate snapshot augmented with binary consensus, inputs fixed per process."""
        return cls(
            box=BlackBox.BINARY_CONSENSUS,
            bc_inputs={pid: {ANY_ROUND: bit} for pid, bit in (beta or {}).items()},
        )

    def with_beta(self, beta: Mapping[int, int]) -> ModelSpec:
        """Return a copy whose box inputs are ``beta`` at every round."""
        return self.model_copy(
            update={"bc_inputs": {pid: {ANY_ROUND: bit} for pid, bit in beta.items()}}
        )

    def check(self) -> None:
        """Raise if the box cannot be combined with the communication primitive."""
        if (
            self.box != BlackBox.NONE
            and self.comm != Communication.IMMEDIATE_SNAPSHOT
        ):
            raise UnsupportedCombinationError(self.comm, self.box)

    def box_input(self, pid: int, round_: int) -> int:
        """Binary consensus input of process ``pid`` at round ``round_``."""
        rounds = self.bc_inputs.get(pid, {})
        bit = rounds.get(round_, rounds.get(ANY_ROUND))
        if bit is None:
            raise ModelError(
                f"No binary consensus input for process {pid} at round {round_}"
            )
        return bit

    def label(self) -> str:
        """Return a short description such as ``iis+ts``."""
        if self.box == BlackBox.NONE:
            return str(self.comm)
        return f"{self.comm}+{self.box}"


@dataclass(frozen=True, slots=True)
class ExecutionMatrix:
    """Two row execution matrix of one round.
    Processes of ``i_blocks[s]`` read the values of ``p_sets[s]``.
    """

    p_sets: tuple[frozenset[int], ...]
    i_blocks: tuple[frozenset[int], ...]

    def views(self) -> dict[int, frozenset[int]]:
        """Read set of every process."""
        return {
            pid: p_set
            for p_set, block in zip(self.p_sets, self.i_blocks, strict=True)
            for pid in block
        }

    def is_snapshot(self) -> bool:
        """Return True if the read sets form a chain."""
        return all(
            a <= b or b <= a for a, b in combinations(self.p_sets, 2)
        )

    def is_immediate(self) -> bool:
        """Return True if every process read implies reading what the other read."""
        block_of = {pid: s for s, block in enumerate(self.i_blocks) for pid in block}
        return all(
            self.p_sets[block_of[q]] <= p_set
            for p_set in self.p_sets
            for q in p_set
        )


@dataclass(frozen=True, slots=True)
class OrderedPartition:
    """Blocks of processes in schedule order, the first block runs first."""

    blocks: tuple[frozenset[int], ...]

    def views(self) -> dict[int, frozenset[int]]:
        """Snapshot of every process: the union of its block and all earlier ones."""
        result: dict[int, frozenset[int]] = {}
        seen: frozenset[int] = frozenset()
        for block in self.blocks:
            seen |= block
            for pid in block:
                result[pid] = seen
        return result

    def sort_key(self) -> tuple[tuple[int, ...], ...]:
        """Canonical order key."""
        return tuple(tuple(sorted(block)) for block in self.blocks)


def _subsets(items: Iterable[int]) -> list[frozenset[int]]:
    """Non empty subsets in (size, ids) order."""
    pool = sorted(items)
    return [
        frozenset(combo)
        for size in range(1, len(pool) + 1)
        for combo in combinations(pool, size)
    ]


def ordered_partitions(pids: Iterable[int]) -> Iterator[OrderedPartition]:
    """Enumerate every ordered partition of ``pids`` in a deterministic order."""
    pool = frozenset(pids)
    if not pool:
        return

    def rec(rest: frozenset[int]) -> Iterator[tuple[frozenset[int], ...]]:
        if not rest:
            yield ()
            return
        for first in _subsets(rest):
            for tail in rec(rest - first):
                yield (first, *tail)

    for blocks in rec(pool):
        yield OrderedPartition(blocks)


def enumerate_collect_matrices(pids: Iterable[int]) -> list[ExecutionMatrix]:
    """All matrices of one collect round among ``pids``.

    :param pids: participating process ids, non empty
    :return: matrices with P_0 = I, blocks partitioning I and
        every later block read by every earlier one, in a deterministic order
    """
    pool = frozenset(pids)
    if not pool:
        raise ValueError("A round needs at least one participant")
    matrices: list[ExecutionMatrix] = []
    for partition in ordered_partitions(pool):
        i_blocks = partition.blocks
        choices: list[list[frozenset[int]]] = [[pool]]
        for s in range(1, len(i_blocks)):
            must = frozenset().union(*i_blocks[s:])
            choices.append([must | extra for extra in [frozenset(), *_subsets(pool - must)]])
        matrices.extend(
            ExecutionMatrix(tuple(p_sets), i_blocks) for p_sets in product(*choices)
        )
    _LOGGER.debug("%s collect matrices for %s processes", len(matrices), len(pool))
    return matrices


def filter_snapshot(matrices: Iterable[ExecutionMatrix]) -> list[ExecutionMatrix]:
    """Keep the matrices whose read sets form a chain."""
    return [matrix for matrix in matrices if matrix.is_snapshot()]


def filter_immediate(matrices: Iterable[ExecutionMatrix]) -> list[OrderedPartition]:
    """Immediate snapshot matrices re-expressed as ordered partitions."""
    partitions: set[OrderedPartition] = set()
    for matrix in matrices:
        if not matrix.is_immediate():
            continue
        groups: dict[frozenset[int], set[int]] = {}
        for pid, view in matrix.views().items():
            groups.setdefault(view, set()).add(pid)
        ordered = sorted(groups.items(), key=lambda item: len(item[0]))
        partitions.add(OrderedPartition(tuple(frozenset(block) for _, block in ordered)))
    return sorted(partitions, key=OrderedPartition.sort_key)


def _assignment(views: Mapping[int, frozenset[int]]) -> ViewAssignment:
    return frozenset(views.items())


def view_assignments(pids: Iterable[int], comm: Communication) -> frozenset[ViewAssignment]:
    """Distinct read set assignments of one round among ``pids``."""
    pool = frozenset(pids)
    if comm == Communication.IMMEDIATE_SNAPSHOT:
        return frozenset(_assignment(p.views()) for p in ordered_partitions(pool))
    matrices = enumerate_collect_matrices(pool)
    if comm == Communication.SNAPSHOT:
        matrices = filter_snapshot(matrices)
    return frozenset(_assignment(m.views()) for m in matrices)


def _box_key(simplex: Simplex, model: ModelSpec, round_: int) -> tuple[tuple[int, int], ...]:
    if model.box != BlackBox.BINARY_CONSENSUS:
        return ()
    return tuple((pid, model.box_input(pid, round_)) for pid in simplex.pids)


@lru_cache(maxsize=65536)
def _one_round_facets(
    simplex: Simplex,
    comm: Communication,
    box: BlackBox,
    box_inputs: tuple[tuple[int, int], ...],
) -> tuple[Simplex, ...]:
    values = simplex.values()

    def vertex(pid: int, seen: frozenset[int], box_output: int | None) -> Vertex:
        view = View.of({j: values[j] for j in seen}, box_output)
        return Vertex(pid, Value.nested(view))

    facets: list[Simplex] = []
    if comm != Communication.IMMEDIATE_SNAPSHOT:
        return tuple(
            Simplex.of(vertex(pid, seen, None) for pid, seen in assignment)
            for assignment in view_assignments(simplex.ids, comm)
        )

    inputs = dict(box_inputs)
    for partition in ordered_partitions(simplex.ids):
        views = partition.views()
        first = partition.blocks[0]
        if box == BlackBox.NONE:
            outcomes: list[dict[int, int | None]] = [dict.fromkeys(views)]
        elif box == BlackBox.TEST_AND_SET:
            outcomes = [
                {pid: int(pid == winner) for pid in views} for winner in sorted(first)
            ]
        else:
            decided = sorted({inputs[pid] for pid in first})
            outcomes = [dict.fromkeys(views, bit) for bit in decided]
        facets.extend(
            Simplex.of(vertex(pid, views[pid], outcome[pid]) for pid in views)
            for outcome in outcomes
        )
    return tuple(facets)


def one_round(simplex: Simplex, model: ModelSpec, round_: int = 1) -> ChromaticComplex:
    """Complex of all one round executions from ``simplex``.

    :param simplex: the round inputs
    :param model: communication primitive and black box
    :param round_: round index, used for binary consensus box inputs
    :return: one facet per execution and box outcome
    """
    model.check()
    facets = _one_round_facets(
        simplex, model.comm, model.box, _box_key(simplex, model, round_)
    )
    return make_complex(facets)


@dataclass(frozen=True)
class ProtocolComplex:
    """Protocol complex after some rounds, with the carrier of every input simplex."""

    complex: ChromaticComplex
    carriers: dict[Simplex, ChromaticComplex]
    rounds: int

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        """All protocol vertices in canonical order."""
        return self.complex.vertices


def carrier(simplex: Simplex, model: ModelSpec, t: int) -> ChromaticComplex:
    """Return the complex reached from ``simplex`` after ``t`` rounds."""
    if t < 0:
        raise ValueError("Round count must be non negative")
    current = make_complex([simplex])
    for round_ in range(1, t + 1):
        current = make_complex(
            facet
            for rho in current.facets
            for facet in one_round(rho, model, round_).facets
        )
    return current


def protocol_complex(inputs: ChromaticComplex, model: ModelSpec, t: int) -> ProtocolComplex:
    """Build P^(t) of an input complex and the carrier of each input simplex."""
    model.check()
    carriers = {
        sigma: carrier(sigma, model, t)
        for sigma in inputs.ordered_simplices()
    }
    union = make_complex(
        facet for sigma in inputs.facets for facet in carriers[sigma].facets
    )
    _LOGGER.debug(
        "Protocol complex %s after %s rounds: %s vertices, %s facets",
        model.label(),
        t,
        len(union.vertices),
        len(union.facets),
    )
    return ProtocolComplex(union, carriers, t)


def iterate(inputs: ChromaticComplex, model: ModelSpec, t: int) -> ChromaticComplex:
    """Return the protocol complex of ``inputs`` after ``t`` rounds."""
    if t == 0:
        return inputs
    model.check()
    return make_complex(
        facet for sigma in inputs.facets for facet in carrier(sigma, model, t).facets
    )


def canonical_iso(source: Simplex, target: Simplex, vertex: Vertex) -> Vertex:
    """Carry a one round vertex from ``source`` to the same position over ``target``."""
    if source.ids != target.ids:
        raise IdMismatchError(
            f"Cannot map {sorted(source.ids)} onto {sorted(target.ids)}"
        )
    view = vertex.value.view
    old, new = source.values(), target.values()
    seen: dict[int, Value] = {}
    for pid, value in view.seen:
        if old.get(pid) != value:
            raise ValueError(f"Vertex {vertex.label()} is not a vertex over {source.label()}")
        seen[pid] = new[pid]
    return Vertex(vertex.pid, Value.nested(View.of(seen, view.box_output)))


def forget_box(k: ChromaticComplex) -> ChromaticComplex:
    """Drop the last round box outputs of every vertex."""
    return make_complex(
        Simplex(
            tuple(
                Vertex(v.pid, Value.nested(View(v.value.view.seen)))
                for v in facet
            )
        )
        for facet in k.facets
    )
