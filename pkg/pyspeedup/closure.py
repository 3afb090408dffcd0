"""Closure of a task with respect to a model, and what is built on it."""

from __future__ import annotations

import asyncio
from collections.abc import Awaitable, Callable, Mapping
from dataclasses import dataclass, replace
from functools import partial
import inspect
from itertools import product
import logging

from pyspeedup.complex import ChromaticComplex, Simplex, Value, Vertex, View, make_complex
from pyspeedup.const import DEFAULT_BUDGET, DEFAULT_MAX_STEPS, DEFAULT_THREADS, BlackBox, TaskKind
from pyspeedup.exceptions import (
    IdMismatchError,
    ModelError,
    NotASolutionError,
    NotInTargetError,
    StepBudgetExceededError,
)
from pyspeedup.models import ModelSpec, protocol_complex
from pyspeedup.solver import SimplicialMap, solve, verify_map
from pyspeedup.tasks import Task, TaskFamily, tasks_equal
from pyspeedup.utils import gather_bounded

_LOGGER = logging.getLogger(__name__)

LocalKey = tuple[Simplex, frozenset[Simplex]]
Transform = Callable[[Task], Task | Awaitable[Task]]


@dataclass(frozen=True)
class LocalTask:
    """Local task of an input simplex σ and a chromatic vertex set τ.
    Each process alone must keep its own vertex of τ, any larger group may
    settle on any simplex of Δ(σ) restricted to its ids.
    """

    sigma: Simplex
    tau: Simplex
    target: ChromaticComplex
    task: Task


def _local(tau: Simplex, images: frozenset[Simplex]) -> Task:
    inputs = make_complex([tau])
    delta: dict[Simplex, frozenset[Simplex]] = {}
    for face in inputs.ordered_simplices():
        if len(face) == 1:
            delta[face] = frozenset({face})
        else:
            delta[face] = frozenset(
                part for image in images if (part := image.project(face.ids)) is not None
            )
    return Task(inputs, make_complex(images), delta)


def local_task(task: Task, sigma: Simplex, tau: Simplex) -> LocalTask:
    """Build the local task of ``task`` for ``sigma`` and ``tau``.

    :param task: the task
    :param sigma: an input simplex of the task
    :param tau: chromatic vertex set with the ids of sigma, not necessarily a simplex of Δ(σ)
    :return: the local task
    """
    if tau.ids != sigma.ids:
        raise IdMismatchError(
            f"{tau.label()} and {sigma.label()} have different process ids"
        )
    images = task.images(sigma)
    if not images:
        raise NotInTargetError(f"Δ({sigma.label()}) is empty")
    target = make_complex(images)
    for vertex in tau:
        if vertex not in target.vertices:
            raise NotInTargetError(f"{vertex.label()} does not occur in Δ({sigma.label()})")
    return LocalTask(sigma, tau, target, _local(tau, images))


def candidate_sets(images: frozenset[Simplex]) -> list[Simplex]:
    """Every chromatic vertex set over the vertices of ``images`` with their full ids."""
    if not images:
        return []
    target = make_complex(images)
    pids = sorted(next(iter(images)).ids)
    per_pid = [target.vertices_of(pid) for pid in pids]
    return [Simplex(combo) for combo in product(*per_pid)]


def majority_side(beta: Mapping[int, int]) -> tuple[int, frozenset[int]]:
    """Larger preimage of ``beta``, ties go to 0."""
    zeros = frozenset(pid for pid, bit in beta.items() if bit == 0)
    ones = frozenset(pid for pid, bit in beta.items() if bit == 1)
    if len(ones) > len(zeros):
        return 1, ones
    return 0, zeros


def zero_round_solvable(task: Task, model: ModelSpec) -> bool:
    """Return True if ``task`` is solvable without communication."""
    return solve(task, model, 0).solvable


class ClosureEngine:
    """Closure computation with respect to one model.

    Local task verdicts are memoized per engine; independent solves run in
    worker threads, at most ``threads`` at a time.
    """

    def __init__(
        self,
        model: ModelSpec,
        threads: int = DEFAULT_THREADS,
        budget: int | None = DEFAULT_BUDGET,
        beta: Mapping[int, int] | None = None,
    ) -> None:
        """Initialize the engine.

        :param model: execution model of the one round local solves
        :param threads: maximal number of concurrent local solves
        :param budget: node budget of every local solve
        :param beta: pinned binary consensus inputs, when None every
            assignment of box inputs is tried
        """
        model.check()
        if beta is not None and model.box != BlackBox.BINARY_CONSENSUS:
            raise ModelError("Box inputs can only be pinned for binary consensus models")
        self.model = model
        self.threads = max(1, threads)
        self.budget = budget
        self.beta = dict(beta) if beta is not None else None
        self._memo: dict[LocalKey, bool] = {}
        self._verified: set[tuple[TaskKind, int, int]] = set()

    def _models_for(self, tau: Simplex) -> list[ModelSpec]:
        if self.model.box != BlackBox.BINARY_CONSENSUS:
            return [self.model]
        if self.beta is not None:
            return [self.model.with_beta(self.beta)]
        return [
            self.model.with_beta(dict(zip(tau.pids, bits, strict=True)))
            for bits in product((0, 1), repeat=len(tau))
        ]

    def solve_local(self, key: LocalKey) -> bool:
        """Return True if the local task of ``key`` is solvable in one round."""
        tau, images = key
        local = _local(tau, images)
        return any(
            solve(local, model, 1, budget=self.budget).solvable
            for model in self._models_for(tau)
        )

    async def closure(self, task: Task) -> Task:
        """Return the closure of ``task``."""
        accepted: dict[Simplex, set[Simplex]] = {}
        pending: dict[LocalKey, list[tuple[Simplex, Simplex]]] = {}
        for sigma in task.inputs.ordered_simplices():
            images = task.images(sigma)
            accepted[sigma] = set()
            for tau in candidate_sets(images):
                if tau in images:
                    accepted[sigma].add(tau)
                    continue
                key = (tau, images)
                if key in self._memo:
                    if self._memo[key]:
                        accepted[sigma].add(tau)
                    continue
                pending.setdefault(key, []).append((sigma, tau))

        keys = list(pending)
        _LOGGER.debug(
            "Closure of %s under %s: %s local solves", task.name, self.model.label(), len(keys)
        )
        verdicts = await gather_bounded(
            [partial(self.solve_local, key) for key in keys], self.threads
        )
        for key, verdict in zip(keys, verdicts, strict=True):
            self._memo[key] = verdict
            if verdict:
                for sigma, tau in pending[key]:
                    accepted[sigma].add(tau)

        delta = {sigma: frozenset(taus) for sigma, taus in accepted.items()}
        chosen = [tau for taus in delta.values() for tau in taus]
        outputs = make_complex(chosen) if chosen else task.outputs
        return Task(task.inputs, outputs, delta)

    async def is_fixed_point(self, task: Task) -> bool:
        """Return True if the closure of ``task`` is ``task`` itself."""
        return tasks_equal(await self.closure(task), task)

    def family_transform(self, factor: int, force_full: bool = False) -> Transform:
        """Closure shortcut for named families.
        The first step computes the closure and checks it against the family
        with its bound multiplied by ``factor``; once that holds, later steps
        re-parameterize the family instead of recomputing closures.
        """

        async def transform(task: Task) -> Task:
            family = task.family
            if family is None or family.eps_num is None or force_full:
                return await self.closure(task)
            target = _successor(family, factor)
            tag = (target.kind, target.n, factor)
            if tag in self._verified:
                return target.build()
            closed = await self.closure(task)
            candidate = target.build()
            if tasks_equal(closed, candidate):
                self._verified.add(tag)
                return candidate
            _LOGGER.warning(
                "Closure of %s is not %s, falling back to full closures",
                family.label(),
                target.label(),
            )
            return closed

        return transform

    async def lower_bound_chain(
        self,
        task: Task,
        transform: Transform | None = None,
        halt: Callable[[Task], bool] | None = None,
        max_steps: int = DEFAULT_MAX_STEPS,
    ) -> int:
        """Number of transform steps before the task becomes 0-round solvable.

        :param task: the starting task
        :param transform: closure or a closed form replacement of it
        :param halt: stop predicate, 0-round solvability by default
        :param max_steps: maximal number of transform steps
        :return: a round lower bound for ``task``, ``max_steps`` for a fixed point
        """
        step = transform or self.closure
        stop = halt or (lambda current: zero_round_solvable(current, self.model))
        current = task
        for index in range(max_steps + 1):
            if await asyncio.to_thread(stop, current):
                _LOGGER.debug("Chain of %s halts after %s steps", task.name, index)
                return index
            if index == max_steps:
                break
            nxt = step(current)
            if inspect.isawaitable(nxt):
                nxt = await nxt
            if tasks_equal(nxt, current):
                _LOGGER.warning(
                    "%s reached a fixed point after %s steps, unbounded within %s",
                    task.name,
                    index,
                    max_steps,
                )
                return max_steps
            current = nxt
        raise StepBudgetExceededError(max_steps)


def _successor(family: TaskFamily, factor: int) -> TaskFamily:
    scaled = family.scaled(factor)
    if scaled.kind == TaskKind.APPROX and scaled.n >= 3:
        # strict agreement relaxes to the liberal form under closure
        return replace(scaled, kind=TaskKind.LIBERAL_APPROX)
    return scaled


def closure(
    task: Task,
    model: ModelSpec,
    threads: int = DEFAULT_THREADS,
    budget: int | None = DEFAULT_BUDGET,
) -> Task:
    """Return the closure of ``task`` with respect to ``model``."""
    return asyncio.run(ClosureEngine(model, threads, budget).closure(task))


def closure_beta(
    task: Task,
    beta: Mapping[int, int],
    model: ModelSpec | None = None,
    threads: int = DEFAULT_THREADS,
    budget: int | None = DEFAULT_BUDGET,
) -> Task:
    """Closure under binary consensus where process i always proposes ``beta[i]``."""
    model = model or ModelSpec.binary_consensus()
    missing = task.inputs.ids - set(beta)
    if missing:
        raise ModelError(f"No box input for processes {sorted(missing)}")
    return asyncio.run(ClosureEngine(model, threads, budget, beta).closure(task))


def is_fixed_point(
    task: Task,
    model: ModelSpec,
    threads: int = DEFAULT_THREADS,
    budget: int | None = DEFAULT_BUDGET,
) -> bool:
    """Return True if ``task`` equals its closure."""
    return asyncio.run(ClosureEngine(model, threads, budget).is_fixed_point(task))


def lower_bound_chain(
    task: Task,
    model: ModelSpec,
    transform: Transform | None = None,
    halt: Callable[[Task], bool] | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    threads: int = DEFAULT_THREADS,
) -> int:
    """Round lower bound of ``task`` from iterated closures, see ``ClosureEngine``."""
    engine = ClosureEngine(model, threads)
    return asyncio.run(engine.lower_bound_chain(task, transform, halt, max_steps))


def speedup_transform(
    task: Task, model: ModelSpec, t: int, f: SimplicialMap
) -> SimplicialMap:
    """Turn a t-round decision map into a (t-1)-round map for the closure.

    Every process decides what it would decide after running the last round
    alone, with the box answer a solo caller receives.

    :param task: the task solved by ``f``
    :param model: the model
    :param t: rounds used by ``f``, at least 1
    :param f: decision map of ``task``
    :return: decision map on the (t-1)-round protocol complex
    """
    if t < 1:
        raise ValueError("The speedup transform needs at least one round")
    if not verify_map(task, model, t, f):
        raise NotASolutionError(f"The map does not solve {task.name} in {t} rounds")

    def solo_box(pid: int) -> int | None:
        if model.box == BlackBox.TEST_AND_SET:
            return 1
        if model.box == BlackBox.BINARY_CONSENSUS:
            return model.box_input(pid, t)
        return None

    previous = protocol_complex(task.inputs, model, t - 1)
    assignment: dict[Vertex, Vertex] = {}
    for vertex in previous.vertices:
        solo = View.of({vertex.pid: vertex.value}, solo_box(vertex.pid))
        assignment[vertex] = f(Vertex(vertex.pid, Value.nested(solo)))
    return SimplicialMap(assignment)
