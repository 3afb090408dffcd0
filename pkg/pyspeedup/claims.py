"""Checked-in corpus of solvability claims and its runner."""

from __future__ import annotations

from fnmatch import fnmatchcase
import logging
from pathlib import Path
import time
from typing import Any

from pydantic import ValidationError

from pyspeedup.closure import ClosureEngine, majority_side, speedup_transform
from pyspeedup.complex import Simplex, Value, Vertex
from pyspeedup.const import (
    CLAIMS_MANIFEST,
    DEFAULT_BUDGET,
    DEFAULT_MAX_STEPS,
    DEFAULT_THREADS,
    ClaimCheck,
    Communication,
    RuleName,
)
from pyspeedup.containers import ClaimOutcome, ClaimsManifest, ClaimSpec, TaskDocument
from pyspeedup.exceptions import DocumentError, PyspeedupError
from pyspeedup.models import (
    ModelSpec,
    carrier,
    enumerate_collect_matrices,
    filter_immediate,
    forget_box,
    one_round,
    ordered_partitions,
    view_assignments,
)
from pyspeedup.rules import rule_map, rule_schedule, run_rule
from pyspeedup.solver import Solvable, solve, solve_exhaustive, verify_map
from pyspeedup.tasks import Task, first_difference, task_from_document
from pyspeedup.utils import read_text

_LOGGER = logging.getLogger(__name__)

MANIFEST_PATH = Path(__file__).with_name(CLAIMS_MANIFEST)

claim_handlers = {}


def claim_handler(check):
    """Register a claim handler for a specific check."""

    def wrapper(func):
        claim_handlers[check] = func
        return func

    return wrapper


async def load_manifest(path: str | Path = MANIFEST_PATH) -> ClaimsManifest:
    """Load a claims manifest."""
    text = await read_text(path)
    try:
        return ClaimsManifest.model_validate_json(text)
    except ValidationError as err:
        raise DocumentError(f"Invalid claims manifest {path}: {err}") from err


def select_claims(manifest: ClaimsManifest, pattern: str | None) -> list[ClaimSpec]:
    """Claims whose id matches the glob ``pattern``, all of them when None."""
    if pattern is None:
        return list(manifest.claims)
    return [claim for claim in manifest.claims if fnmatchcase(claim.claim_id, pattern)]


def _task(data: dict[str, Any]) -> Task:
    try:
        return task_from_document(TaskDocument.model_validate(data))
    except ValidationError as err:
        raise DocumentError(f"Invalid task in claim: {err}") from err


def _model(data: dict[str, Any] | None) -> ModelSpec:
    try:
        model = ModelSpec.model_validate(data or {})
    except ValidationError as err:
        raise DocumentError(f"Invalid model in claim: {err}") from err
    model.check()
    return model


def _beta(data: dict[str, int] | None) -> dict[int, int] | None:
    return None if data is None else {int(pid): bit for pid, bit in data.items()}


class ClaimRunner:
    """Runs claims, one engine per model so closures share their memo."""

    def __init__(
        self,
        threads: int = DEFAULT_THREADS,
        budget: int | None = DEFAULT_BUDGET,
    ) -> None:
        """Initialize the runner."""
        self.threads = threads
        self.budget = budget
        self._engines: dict[tuple[str, str], ClosureEngine] = {}

    def engine(self, model: ModelSpec, beta: dict[int, int] | None = None) -> ClosureEngine:
        """Closure engine for ``model``, shared between claims."""
        key = (model.model_dump_json(), repr(sorted((beta or {}).items())))
        if key not in self._engines:
            self._engines[key] = ClosureEngine(model, self.threads, self.budget, beta)
        return self._engines[key]

    async def run(self, claims: list[ClaimSpec]) -> list[ClaimOutcome]:
        """Run claims in manifest order."""
        outcomes = []
        for claim in claims:
            start = time.perf_counter()
            handler = claim_handlers.get(claim.check)
            if handler is None:
                _LOGGER.error("Unknown claim check: %s", claim.check)
                passed, detail = False, f"unknown check {claim.check}"
            else:
                try:
                    passed, detail = await handler(self, claim.params)
                except PyspeedupError as err:
                    passed, detail = False, f"{type(err).__name__}: {err}"
            seconds = time.perf_counter() - start
            _LOGGER.info(
                "Claim %s %s in %.2fs", claim.claim_id, "passed" if passed else "FAILED", seconds
            )
            outcomes.append(
                ClaimOutcome(
                    claim_id=claim.claim_id, passed=passed, detail=detail, seconds=seconds
                )
            )
        return outcomes

    @claim_handler(ClaimCheck.PROTOCOL_SHAPE)
    async def _check_protocol_shape(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Vertex and facet counts of a one simplex protocol complex."""
        size = params["n"]
        sigma = Simplex.of(Vertex(pid, Value.symbol(f"x{pid}")) for pid in range(1, size + 1))
        model = _model(params.get("model"))
        complex_ = carrier(sigma, model, params.get("t", 1))
        vertices, facets = len(complex_.vertices), len(complex_.facets)
        passed = vertices == params["vertices"]
        if "facets" in params:
            passed = passed and facets == params["facets"]
        if "per_id" in params:
            passed = passed and all(
                len(complex_.vertices_of(pid)) == params["per_id"] for pid in sigma.pids
            )
        return passed, f"{vertices} vertices, {facets} facets"

    @claim_handler(ClaimCheck.MODEL_CONTAINMENT)
    async def _check_model_containment(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Immediate snapshot within snapshot within collect, as view assignments."""
        details = []
        passed = True
        for size in range(1, params["max_ids"] + 1):
            pids = range(1, size + 1)
            iis = view_assignments(pids, Communication.IMMEDIATE_SNAPSHOT)
            snapshot = view_assignments(pids, Communication.SNAPSHOT)
            collect = view_assignments(pids, Communication.COLLECT)
            passed = passed and iis <= snapshot <= collect
            if size >= params.get("strict_from", size + 1):
                passed = passed and iis < snapshot < collect
            partitions = filter_immediate(enumerate_collect_matrices(pids))
            passed = passed and set(partitions) == set(ordered_partitions(pids))
            details.append(f"{size}: {len(iis)}/{len(snapshot)}/{len(collect)}")
        return passed, ", ".join(details)

    @claim_handler(ClaimCheck.SOLVE)
    async def _check_solve(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Solver verdict."""
        task, model = _task(params["task"]), _model(params.get("model"))
        verdict = solve(task, model, params["t"], budget=self.budget)
        return verdict.solvable == params["expected"], f"{type(verdict).__name__}, {verdict.explored} nodes"

    @claim_handler(ClaimCheck.CLOSURE_EQUALS)
    async def _check_closure_equals(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Closure equals an expected task."""
        task, model = _task(params["task"]), _model(params.get("model"))
        expected = _task(params["expected"])
        closed = await self.engine(model, _beta(params.get("beta"))).closure(task)
        sigma = first_difference(closed, expected, params.get("participants"))
        if sigma is None:
            return True, f"closure is {expected.name}"
        return False, f"closure differs from {expected.name} at {sigma.label()}"

    @claim_handler(ClaimCheck.FIXED_POINT)
    async def _check_fixed_point(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Task equals its closure."""
        task, model = _task(params["task"]), _model(params.get("model"))
        fixed = await self.engine(model).is_fixed_point(task)
        return fixed == params["expected"], "fixed point" if fixed else "not a fixed point"

    @claim_handler(ClaimCheck.LOWER_BOUND)
    async def _check_lower_bound(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Closure chain length."""
        task, model = _task(params["task"]), _model(params.get("model"))
        engine = self.engine(model)
        transform = None
        if "factor" in params:
            transform = engine.family_transform(params["factor"])
        bound = await engine.lower_bound_chain(
            task, transform, max_steps=params.get("max_steps", DEFAULT_MAX_STEPS)
        )
        return bound == params["expected"], f"lower bound {bound}"

    @claim_handler(ClaimCheck.RUN_RULE)
    async def _check_run_rule(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Named rule solves the task."""
        task, model = _task(params["task"]), _model(params.get("model"))
        t = params["t"]
        rules = rule_schedule(RuleName(params["rule"]), task, t, _beta(params.get("beta")))
        verdict = run_rule(task, model, t, rules)
        return verdict == params.get("expected", True), f"rule map valid: {verdict}"

    @claim_handler(ClaimCheck.SPEEDUP)
    async def _check_speedup(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Speedup of a witness solves the closure one round faster.

        The witness is the map of a named rule when the claim gives one,
        otherwise the one found by the solver.
        """
        task, model = _task(params["task"]), _model(params.get("model"))
        t = params["t"]
        if "rule" in params:
            rules = rule_schedule(RuleName(params["rule"]), task, t, _beta(params.get("beta")))
            witness = rule_map(task, model, t, rules)
            if not verify_map(task, model, t, witness):
                return False, f"rule {params['rule']} does not solve the task"
        else:
            verdict = solve(task, model, t, budget=self.budget)
            if not isinstance(verdict, Solvable):
                return False, f"no witness in {t} rounds"
            witness = verdict.witness
        faster = speedup_transform(task, model, t, witness)
        closed = await self.engine(model).closure(task)
        valid = verify_map(closed, model, t - 1, faster)
        return valid, f"transformed map valid: {valid}"

    @claim_handler(ClaimCheck.BRUTE_FORCE)
    async def _check_brute_force(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Search verdict matches plain enumeration."""
        task, model = _task(params["task"]), _model(params.get("model"))
        t = params["t"]
        searched = solve(task, model, t).solvable
        enumerated = solve_exhaustive(task, model, t).solvable
        return searched == enumerated, f"search {searched}, enumeration {enumerated}"

    @claim_handler(ClaimCheck.UNIFORM_BETA)
    async def _check_uniform_beta(self, params: dict[str, Any]) -> tuple[bool, str]:
        """Closure under pinned box inputs on the majority side of beta."""
        task = _task(params["task"])
        expected = _task(params["expected"])
        beta = _beta(params["beta"])
        bit, side = majority_side(beta)
        model = ModelSpec.binary_consensus(beta)
        sigma = Simplex.of(Vertex(pid, Value.symbol(f"x{pid}")) for pid in sorted(side))
        plain = one_round(sigma, ModelSpec.iis())
        boxed = one_round(sigma, model)
        if forget_box(boxed).facets != plain.facets or len(boxed) != len(plain):
            return False, f"box inputs {bit} change the one round complex"
        closed = await self.engine(model, beta).closure(task)
        differs = first_difference(closed, expected, side)
        if differs is None:
            return True, f"closure is {expected.name} on {sorted(side)}"
        return False, f"closure differs from {expected.name} at {differs.label()}"
