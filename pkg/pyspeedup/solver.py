"""Decision map search: t-round solvability of a task in a model."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
import logging
import time

from pydantic import ValidationError

from pyspeedup.complex import Simplex, Vertex, vertex_from_document, vertex_to_document
from pyspeedup.const import BRUTE_FORCE_MAX_VERTICES
from pyspeedup.containers import WitnessDocument
from pyspeedup.exceptions import DocumentError, PartialMapError, ResourceLimitError
from pyspeedup.models import ModelSpec, ProtocolComplex, protocol_complex
from pyspeedup.tasks import Task

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimplicialMap:
    """Color preserving vertex map from a protocol complex to an output complex."""

    assignment: Mapping[Vertex, Vertex]

    def __call__(self, vertex: Vertex) -> Vertex:
        """Image of a vertex."""
        try:
            return self.assignment[vertex]
        except KeyError as err:
            raise PartialMapError(f"Vertex {vertex.label()} is not assigned") from err

    def image(self, simplex: Simplex) -> Simplex:
        """Image of a simplex."""
        return Simplex.of(self(v) for v in simplex)

    def to_document(self) -> WitnessDocument:
        """Encode the map, pairs in canonical order of the protocol vertices."""
        return WitnessDocument(
            assignment=[
                (vertex_to_document(v), vertex_to_document(self.assignment[v]))
                for v in sorted(self.assignment)
            ]
        )

    @classmethod
    def from_document(cls, doc: WitnessDocument) -> SimplicialMap:
        """Decode a witness document."""
        return cls(
            {vertex_from_document(a): vertex_from_document(b) for a, b in doc.assignment}
        )

    @classmethod
    def parse(cls, text: str) -> SimplicialMap:
        """Parse a witness from its JSON text."""
        try:
            doc = WitnessDocument.model_validate_json(text)
        except ValidationError as err:
            raise DocumentError(f"Invalid witness document: {err}") from err
        return cls.from_document(doc)


@dataclass(frozen=True)
class Solvable:
    """A decision map exists."""

    witness: SimplicialMap
    explored: int = 0

    @property
    def solvable(self) -> bool:
        """Return True."""
        return True


@dataclass(frozen=True)
class Unsolvable:
    """The search space was exhausted."""

    explored: int

    @property
    def solvable(self) -> bool:
        """Return False."""
        return False


SolveVerdict = Solvable | Unsolvable


@dataclass
class _Problem:
    """Table constraint network over integer indices."""

    variables: tuple[Vertex, ...]
    values: tuple[Vertex, ...]
    domains: list[frozenset[int]]
    scopes: list[tuple[int, ...]] = field(default_factory=list)
    tables: list[list[tuple[int, ...]]] = field(default_factory=list)
    watchers: list[list[int]] = field(default_factory=list)


def _carrier_constraints(
    task: Task, protocol: ProtocolComplex
) -> Iterable[tuple[Simplex, frozenset[Simplex]]]:
    for sigma in task.inputs.ordered_simplices():
        allowed = task.images(sigma)
        for rho in protocol.carriers[sigma].facets:
            yield rho, allowed


def _build_problem(task: Task, protocol: ProtocolComplex) -> _Problem:
    variables = protocol.vertices
    values = task.outputs.vertices
    var_index = {v: i for i, v in enumerate(variables)}
    value_index = {v: i for i, v in enumerate(values)}
    domains = [
        frozenset(j for j, out in enumerate(values) if out.pid == var.pid)
        for var in variables
    ]

    tables: dict[tuple[int, ...], set[tuple[int, ...]]] = {}
    for rho, allowed in _carrier_constraints(task, protocol):
        scope = tuple(var_index[v] for v in rho)
        rows = {
            tuple(value_index[w] for w in tau)
            for tau in allowed
            if tau.pids == rho.pids
        }
        tables[scope] = rows if scope not in tables else tables[scope] & rows

    problem = _Problem(variables, values, domains)
    problem.watchers = [[] for _ in variables]
    for scope in sorted(tables):
        rows = tables[scope]
        if len(scope) == 1:
            # unary constraints narrow the domain directly
            problem.domains[scope[0]] &= frozenset(row[0] for row in rows)
            continue
        index = len(problem.scopes)
        problem.scopes.append(scope)
        problem.tables.append(sorted(rows))
        for var in scope:
            problem.watchers[var].append(index)
    return problem


def _propagate(problem: _Problem, domains: list[frozenset[int]], queue: Iterable[int]) -> bool:
    """Generalized arc consistency; False on a domain wipe out."""
    pending = deque(queue)
    queued = set(pending)
    while pending:
        index = pending.popleft()
        queued.discard(index)
        scope = problem.scopes[index]
        valid = [
            row
            for row in problem.tables[index]
            if all(value in domains[var] for var, value in zip(scope, row, strict=True))
        ]
        if not valid:
            return False
        for pos, var in enumerate(scope):
            supported = frozenset(row[pos] for row in valid)
            if supported == domains[var]:
                continue
            domains[var] = supported
            for other in problem.watchers[var]:
                if other != index and other not in queued:
                    pending.append(other)
                    queued.add(other)
    return True


def _choose(domains: list[frozenset[int]]) -> int | None:
    """Unassigned variable with the smallest domain, ties by canonical order."""
    best, best_size = None, 0
    for var, domain in enumerate(domains):
        size = len(domain)
        if size > 1 and (best is None or size < best_size):
            best, best_size = var, size
    return best


def solve(
    task: Task,
    model: ModelSpec,
    t: int,
    budget: int | None = None,
    time_limit: float | None = None,
    protocol: ProtocolComplex | None = None,
) -> SolveVerdict:
    """Search for a decision map solving ``task`` in ``t`` rounds.

    :param task: the task
    :param model: the execution model
    :param t: number of rounds
    :param budget: maximal number of search nodes
    :param time_limit: maximal search time in seconds
    :param protocol: a precomputed protocol complex for the task inputs
    :return: Solvable with a witness, or Unsolvable once the search is exhausted
    """
    if protocol is None:
        protocol = protocol_complex(task.inputs, model, t)
    problem = _build_problem(task, protocol)
    domains = list(problem.domains)
    explored = 1
    if any(not d for d in domains) or not _propagate(
        problem, domains, range(len(problem.scopes))
    ):
        _LOGGER.debug("%s in %s rounds: refuted by propagation", task.name, t)
        return Unsolvable(explored)

    deadline = None if time_limit is None else time.monotonic() + time_limit
    first = _choose(domains)
    solution = domains if first is None else None
    stack: list[tuple[list[frozenset[int]], int, list[int]]] = []
    if first is not None:
        stack.append((domains, first, sorted(domains[first], reverse=True)))
    while stack and solution is None:
        base, var, pending = stack[-1]
        if not pending:
            stack.pop()
            continue
        value = pending.pop()
        explored += 1
        if budget is not None and explored > budget:
            raise ResourceLimitError(budget, explored)
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceLimitError(time_limit, explored)
        child = list(base)
        child[var] = frozenset({value})
        if not _propagate(problem, child, problem.watchers[var]):
            continue
        nxt = _choose(child)
        if nxt is None:
            solution = child
        else:
            stack.append((child, nxt, sorted(child[nxt], reverse=True)))

    if solution is None:
        _LOGGER.debug("%s in %s rounds: unsolvable, %s nodes", task.name, t, explored)
        return Unsolvable(explored)
    witness = SimplicialMap(
        {
            problem.variables[i]: problem.values[next(iter(domain))]
            for i, domain in enumerate(solution)
        }
    )
    _LOGGER.debug("%s in %s rounds: solvable, %s nodes", task.name, t, explored)
    return Solvable(witness, explored)


def verify_map(
    task: Task,
    model: ModelSpec,
    t: int,
    f: SimplicialMap,
    protocol: ProtocolComplex | None = None,
) -> bool:
    """Check that ``f`` is a decision map of ``task`` in ``t`` rounds.
    Raises PartialMapError if a protocol vertex is unassigned.
    """
    if protocol is None:
        protocol = protocol_complex(task.inputs, model, t)
    missing = [v for v in protocol.vertices if v not in f.assignment]
    if missing:
        raise PartialMapError(
            f"{len(missing)} protocol vertices unassigned, first {missing[0].label()}"
        )
    for vertex in protocol.vertices:
        if f(vertex).pid != vertex.pid:
            _LOGGER.debug("Map changes the color of %s", vertex.label())
            return False
    for sigma, carrier in protocol.carriers.items():
        allowed = task.images(sigma)
        for rho in carrier.facets:
            image = f.image(rho)
            if image not in task.outputs:
                _LOGGER.debug("Image %s is not an output simplex", image.label())
                return False
            if image not in allowed and not any(image.issubset(tau) for tau in allowed):
                _LOGGER.debug(
                    "Image %s of %s is not in Δ(%s)",
                    image.label(),
                    rho.label(),
                    sigma.label(),
                )
                return False
    return True


def solve_exhaustive(
    task: Task,
    model: ModelSpec,
    t: int,
    max_vertices: int = BRUTE_FORCE_MAX_VERTICES,
) -> SolveVerdict:
    """Plain chronological enumeration of color preserving assignments.
    Every carrier facet is checked once its last vertex is assigned; nothing
    is propagated. Meant as an independent oracle for ``solve``.
    """
    protocol = protocol_complex(task.inputs, model, t)
    variables = protocol.vertices
    if len(variables) > max_vertices:
        raise ResourceLimitError(max_vertices, 0)
    order = {v: i for i, v in enumerate(variables)}
    candidates = [task.outputs.vertices_of(v.pid) for v in variables]
    due: list[list[tuple[Simplex, frozenset[Simplex]]]] = [[] for _ in variables]
    for rho, allowed in _carrier_constraints(task, protocol):
        due[max(order[v] for v in rho)].append((rho, allowed))

    assignment: dict[Vertex, Vertex] = {}
    explored = 0

    def consistent(index: int) -> bool:
        for rho, allowed in due[index]:
            image = Simplex.of(assignment[v] for v in rho)
            if image not in allowed:
                return False
        return True

    def extend(index: int) -> bool:
        nonlocal explored
        if index == len(variables):
            return True
        for candidate in candidates[index]:
            explored += 1
            assignment[variables[index]] = candidate
            if consistent(index) and extend(index + 1):
                return True
        assignment.pop(variables[index], None)
        return False

    if extend(0):
        return Solvable(SimplicialMap(dict(assignment)), explored)
    return Unsolvable(explored)
