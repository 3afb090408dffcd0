"""Tasks as explicit finite objects."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, replace
from itertools import combinations, product
import logging

from pydantic import ValidationError

from pyspeedup.complex import (
    ChromaticComplex,
    Simplex,
    Value,
    Vertex,
    complex_from_document,
    complex_to_document,
    complexes_equal,
    make_complex,
    simplex_from_documents,
    simplex_to_documents,
)
from pyspeedup.const import TaskKind
from pyspeedup.containers import DeltaEntry, TaskDocument
from pyspeedup.exceptions import (
    BadGridError,
    DocumentError,
    InputMismatchError,
    TaskError,
)

_LOGGER = logging.getLogger(__name__)

BITS = (Value.bit(0), Value.bit(1))


@dataclass(frozen=True, slots=True)
class TaskFamily:
    """Parameters of a named task, used to rebuild or re-parameterize it."""

    kind: TaskKind
    n: int
    m: int | None = None
    eps_num: int | None = None

    def build(self) -> Task:
        """Construct the task."""
        return _BUILDERS[self.kind](self)

    def scaled(self, factor: int) -> TaskFamily:
        """Same family with its agreement bound multiplied by ``factor``."""
        if self.eps_num is None:
            return self
        return replace(self, eps_num=self.eps_num * factor)

    def label(self) -> str:
        """Return a short description such as ``approx(n=3, eps=1/4)``."""
        if self.eps_num is None:
            return f"{self.kind}(n={self.n})"
        return f"{self.kind}(n={self.n}, eps={self.eps_num}/{self.m})"


@dataclass(frozen=True, eq=False)
class Task:
    """Dataclass for a task (inputs, outputs, Δ).
    ``delta`` is total on the simplices of ``inputs``.
    """

    inputs: ChromaticComplex
    outputs: ChromaticComplex
    delta: Mapping[Simplex, frozenset[Simplex]]
    family: TaskFamily | None = None

    @property
    def name(self) -> str:
        """Human readable task name."""
        return self.family.label() if self.family else "custom"

    def images(self, sigma: Simplex) -> frozenset[Simplex]:
        """Return Δ(σ)."""
        try:
            return self.delta[sigma]
        except KeyError as err:
            raise TaskError(f"{sigma.label()} is not an input simplex") from err

    def target(self, sigma: Simplex) -> ChromaticComplex:
        """Return Δ(σ) as a complex."""
        return make_complex(self.images(sigma))


def full_simplices(pids: Sequence[int], values: Sequence[Value]) -> Iterator[Simplex]:
    """All simplices colored exactly by ``pids`` over ``values``."""
    for combo in product(values, repeat=len(pids)):
        yield Simplex(tuple(Vertex(pid, v) for pid, v in zip(pids, combo, strict=True)))


def chromatic_simplices(pids: Sequence[int], values: Sequence[Value]) -> Iterator[Simplex]:
    """Every chromatic simplex over ``pids`` and ``values``."""
    for size in range(1, len(pids) + 1):
        for subset in combinations(pids, size):
            yield from full_simplices(subset, values)


def grid(m: int) -> tuple[Value, ...]:
    """Points of the 1/m grid on [0, 1]."""
    return tuple(Value.rational(k, m) for k in range(m + 1))


def _constant(pids: Sequence[int], value: Value) -> Simplex:
    return Simplex(tuple(Vertex(pid, value) for pid in pids))


def _assemble(
    inputs: ChromaticComplex,
    delta: dict[Simplex, frozenset[Simplex]],
    family: TaskFamily | None,
    extra_outputs: Iterable[Simplex] = (),
) -> Task:
    outputs = make_complex([*(tau for images in delta.values() for tau in images), *extra_outputs])
    return Task(inputs, outputs, delta, family)


def _check_n(n: int, least: int) -> None:
    if n < least:
        raise TaskError(f"This task needs at least {least} processes, got {n}")


def _consensus(family: TaskFamily, weak: bool) -> Task:
    pids = tuple(range(1, family.n + 1))
    inputs = make_complex(full_simplices(pids, BITS))
    delta: dict[Simplex, frozenset[Simplex]] = {}
    for sigma in inputs.ordered_simplices():
        if len(set(sigma.values().values())) == 1:
            delta[sigma] = frozenset({sigma})
        elif weak and len(sigma) <= 2:
            delta[sigma] = frozenset(full_simplices(sigma.pids, BITS))
        else:
            delta[sigma] = frozenset(_constant(sigma.pids, bit) for bit in BITS)
    return _assemble(inputs, delta, family)


def binary_consensus(n: int) -> Task:
    """Binary consensus among n processes.
    Unanimous inputs must be kept, mixed inputs must all decide one common bit.
    """
    _check_n(n, 2)
    return _consensus(TaskFamily(TaskKind.CONSENSUS, n), weak=False)


def weak_consensus(n: int) -> Task:
    """Consensus where agreement binds only when at least three processes participate."""
    _check_n(n, 3)
    return _consensus(TaskFamily(TaskKind.WEAK_CONSENSUS, n), weak=True)


def _approx(family: TaskFamily, liberal: bool) -> Task:
    m, eps_num = family.m, family.eps_num
    if m is None or eps_num is None or m <= 0 or eps_num <= 0:
        raise BadGridError(f"Invalid grid m={m}, eps_num={eps_num}")
    points = grid(m)
    pids = tuple(range(1, family.n + 1))
    inputs = make_complex(full_simplices(pids, points))
    delta: dict[Simplex, frozenset[Simplex]] = {}
    for sigma in inputs.ordered_simplices():
        nums = [v.value.payload[0] for v in sigma]
        low, high = min(nums), max(nums)
        bound = high - low if liberal and len(sigma) == 2 else eps_num
        delta[sigma] = frozenset(
            tau
            for tau in full_simplices(sigma.pids, points[low : high + 1])
            if _spread(tau) <= bound
        )
    extra: list[Simplex] = []
    if liberal:
        extra.extend(
            s for s in chromatic_simplices(pids, points) if len(s) == 2
        )
    return _assemble(inputs, delta, family, extra)


def _spread(tau: Simplex) -> int:
    nums = [v.value.payload[0] for v in tau]
    return max(nums) - min(nums)


def approx_agreement(n: int, m: int, eps_num: int) -> Task:
    """ε-approximate agreement on the 1/m grid with ε = eps_num/m.

    :param n: number of processes
    :param m: grid resolution
    :param eps_num: agreement bound numerator, bounds at or past m are vacuous
    :return: the task
    """
    _check_n(n, 2)
    return _approx(TaskFamily(TaskKind.APPROX, n, m, eps_num), liberal=False)


def liberal_approx_agreement(n: int, m: int, eps_num: int) -> Task:
    """Approximate agreement without the agreement bound for exactly two participants."""
    _check_n(n, 3)
    return _approx(TaskFamily(TaskKind.LIBERAL_APPROX, n, m, eps_num), liberal=True)


_BUILDERS = {
    TaskKind.CONSENSUS: lambda f: binary_consensus(f.n),
    TaskKind.WEAK_CONSENSUS: lambda f: weak_consensus(f.n),
    TaskKind.APPROX: lambda f: approx_agreement(f.n, f.m, f.eps_num),
    TaskKind.LIBERAL_APPROX: lambda f: liberal_approx_agreement(f.n, f.m, f.eps_num),
}


def first_difference(
    a: Task, b: Task, participants: Iterable[int] | None = None
) -> Simplex | None:
    """First input simplex, in canonical order, where the two Δ maps differ."""
    if not complexes_equal(a.inputs, b.inputs):
        raise InputMismatchError("Tasks have different input complexes")
    allowed = None if participants is None else frozenset(participants)
    for sigma in a.inputs.ordered_simplices():
        if allowed is not None and not sigma.ids <= allowed:
            continue
        if a.images(sigma) != b.images(sigma):
            return sigma
    return None


def tasks_equal(a: Task, b: Task, participants: Iterable[int] | None = None) -> bool:
    """Return True if both tasks have the same Δ.

    :param participants: compare only input simplices colored within this set
    """
    sigma = first_difference(a, b, participants)
    if sigma is not None:
        _LOGGER.debug("Tasks differ at %s", sigma.label())
    return sigma is None


def check_task(task: Task) -> None:
    """Raise TaskError if Δ is partial, changes ids or leaves the outputs."""
    for sigma in task.inputs.ordered_simplices():
        images = task.images(sigma)
        for tau in images:
            if tau.ids != sigma.ids:
                raise TaskError(
                    f"Δ({sigma.label()}) contains {tau.label()} with other ids"
                )
            if tau not in task.outputs:
                raise TaskError(f"{tau.label()} is not an output simplex")


def task_from_document(doc: TaskDocument) -> Task:
    """Build a task from its document."""
    if doc.kind != TaskKind.CUSTOM:
        return TaskFamily(doc.kind, doc.n, doc.m, doc.eps_num).build()
    inputs = complex_from_document(doc.inputs)
    outputs = complex_from_document(doc.outputs)
    delta: dict[Simplex, frozenset[Simplex]] = {}
    for row in doc.delta:
        sigma = simplex_from_documents(row.simplex)
        delta[sigma] = frozenset(simplex_from_documents(tau) for tau in row.images)
    missing = [s for s in inputs.ordered_simplices() if s not in delta]
    if missing:
        raise DocumentError(f"Δ is not given for {missing[0].label()}")
    task = Task(inputs, outputs, delta)
    check_task(task)
    return task


def task_to_document(task: Task) -> TaskDocument:
    """Encode a task, named families by their parameters only."""
    if task.family is not None:
        family = task.family
        return TaskDocument(kind=family.kind, n=family.n, m=family.m, eps_num=family.eps_num)
    n = max(task.inputs.ids)
    rows = [
        DeltaEntry(
            simplex=simplex_to_documents(sigma),
            images=[
                simplex_to_documents(tau)
                for tau in sorted(task.images(sigma), key=Simplex.sort_key)
            ],
        )
        for sigma in task.inputs.ordered_simplices()
    ]
    return TaskDocument(
        kind=TaskKind.CUSTOM,
        n=n,
        inputs=complex_to_document(task.inputs, n),
        outputs=complex_to_document(task.outputs, n),
        delta=rows,
    )


def parse_task(text: str) -> Task:
    """Parse a task from its JSON text."""
    try:
        doc = TaskDocument.model_validate_json(text)
    except ValidationError as err:
        raise DocumentError(f"Invalid task document: {err}") from err
    return task_from_document(doc)


def delta_table(task: Task) -> str:
    """Human readable Δ table, one input simplex per line."""
    lines = [f"# {task.name}"]
    for sigma in task.inputs.ordered_simplices():
        images = sorted(task.images(sigma), key=Simplex.sort_key)
        lines.append(f"{sigma.label()} -> " + " | ".join(tau.label() for tau in images))
    return "\n".join(lines) + "\n"
