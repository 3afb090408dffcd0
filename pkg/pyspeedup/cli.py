"""Command line front end of pyspeedup."""

from __future__ import annotations

import argparse
import asyncio
from collections.abc import Sequence
import json
import logging
import sys
from typing import Literal

from pydantic import TypeAdapter, ValidationError

from pyspeedup import __version__
from pyspeedup.claims import MANIFEST_PATH, ClaimRunner, load_manifest, select_claims
from pyspeedup.closure import ClosureEngine, speedup_transform
from pyspeedup.complex import (
    ChromaticComplex,
    Simplex,
    Value,
    Vertex,
    complex_from_document,
    complex_to_document,
    make_complex,
    to_dot,
)
from pyspeedup.const import (
    DEFAULT_BUDGET,
    DEFAULT_MAX_STEPS,
    DEFAULT_THREADS,
    BlackBox,
    Communication,
    ExitCode,
    ExportFormat,
    RuleName,
)
from pyspeedup.containers import ComplexDocument, TaskDocument
from pyspeedup.exceptions import (
    DocumentError,
    PyspeedupError,
    ResourceLimitError,
    StepBudgetExceededError,
)
from pyspeedup.models import ModelSpec, protocol_complex
from pyspeedup.rules import rule_schedule, run_rule
from pyspeedup.solver import Solvable, solve
from pyspeedup.tasks import Task, delta_table, task_from_document, task_to_document
from pyspeedup.utils import dump_json, read_text, write_text

_LOGGER = logging.getLogger(__name__)

_BETA = TypeAdapter(dict[int, Literal[0, 1]])


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-command per operation."""
    parser = argparse.ArgumentParser(
        prog="pyspeedup",
        description="Round complexity of distributed tasks in iterated shared memory models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node budget")
    commands = parser.add_subparsers(dest="command", required=True)

    def with_model(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--model", help="model JSON file")
        sub.add_argument("--comm", choices=[c.value for c in Communication], default=Communication.IMMEDIATE_SNAPSHOT.value)
        sub.add_argument("--box", choices=[b.value for b in BlackBox], default=BlackBox.NONE.value)

    gen = commands.add_parser("gen-protocol", help="build a protocol complex")
    source = gen.add_mutually_exclusive_group(required=True)
    source.add_argument("--n", type=int, help="one simplex with ids 1..n")
    source.add_argument("--input", help="input complex JSON file")
    with_model(gen)
    gen.add_argument("--rounds", type=int, default=1)
    gen.add_argument("--out", help="write the complex as JSON")
    gen.add_argument("--dot", help="write the 1-skeleton as DOT")

    solve_cmd = commands.add_parser("solve", help="decide t-round solvability")
    solve_cmd.add_argument("--task", required=True)
    with_model(solve_cmd)
    solve_cmd.add_argument("--rounds", type=int, required=True)
    solve_cmd.add_argument("--witness", help="write the decision map as JSON")
    solve_cmd.add_argument("--speedup", help="write the speedup of the witness as JSON")

    closure_cmd = commands.add_parser("closure", help="closure of a task")
    closure_cmd.add_argument("--task", required=True)
    with_model(closure_cmd)
    closure_cmd.add_argument("--beta", help="pinned binary consensus inputs JSON file")
    closure_cmd.add_argument("--out")

    fixed = commands.add_parser("fixed-point", help="check that a task equals its closure")
    fixed.add_argument("--task", required=True)
    with_model(fixed)

    bound = commands.add_parser("lower-bound", help="round lower bound from closure chains")
    bound.add_argument("--task", required=True)
    with_model(bound)
    bound.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    bound.add_argument("--factor", type=int, help="re-parameterize the family by this factor once verified")

    rule = commands.add_parser("run-rule", help="check a named decision rule")
    rule.add_argument("--rule", required=True, choices=[r.value for r in RuleName])
    rule.add_argument("--task", required=True)
    with_model(rule)
    rule.add_argument("--rounds", type=int, required=True)
    rule.add_argument("--beta", help="binary consensus inputs JSON file, for the leader rule")

    claims = commands.add_parser("verify-claims", help="run the claims corpus")
    claims.add_argument("--filter", help="claim id glob")
    claims.add_argument("--manifest", default=str(MANIFEST_PATH))

    export = commands.add_parser("export", help="convert a complex or task file")
    export.add_argument("input")
    export.add_argument("--format", choices=[f.value for f in ExportFormat], default=ExportFormat.JSON.value)
    export.add_argument("--out")
    return parser


async def _load_model(args: argparse.Namespace) -> ModelSpec:
    if args.model:
        try:
            model = ModelSpec.model_validate_json(await read_text(args.model))
        except ValidationError as err:
            raise DocumentError(f"Invalid model document: {err}") from err
    else:
        model = ModelSpec(comm=args.comm, box=args.box)
    model.check()
    return model


async def _load_task(path: str) -> Task:
    try:
        doc = TaskDocument.model_validate_json(await read_text(path))
    except ValidationError as err:
        raise DocumentError(f"Invalid task document: {err}") from err
    return task_from_document(doc)


async def _load_beta(path: str | None) -> dict[int, int] | None:
    if path is None:
        return None
    try:
        return dict(_BETA.validate_json(await read_text(path)))
    except ValidationError as err:
        raise DocumentError(f"Invalid box input document: {err}") from err


async def _emit(text: str, path: str | None) -> None:
    if path:
        await write_text(path, text)
    else:
        sys.stdout.write(text)


async def _gen_protocol(args: argparse.Namespace) -> ExitCode:
    model = await _load_model(args)
    if args.n is not None:
        inputs = make_complex(
            [Simplex.of(Vertex(pid, Value.symbol(f"x{pid}")) for pid in range(1, args.n + 1))]
        )
    else:
        inputs = await _load_complex(args.input)
    protocol = await asyncio.to_thread(protocol_complex, inputs, model, args.rounds)
    sys.stdout.write(
        f"vertices: {len(protocol.vertices)}\nfacets: {len(protocol.complex.facets)}\n"
    )
    if args.out:
        await write_text(args.out, dump_json(complex_to_document(protocol.complex)))
    if args.dot:
        await write_text(args.dot, to_dot(protocol.complex, "protocol"))
    return ExitCode.OK


async def _load_complex(path: str) -> ChromaticComplex:
    try:
        doc = ComplexDocument.model_validate_json(await read_text(path))
    except ValidationError as err:
        raise DocumentError(f"Invalid complex document: {err}") from err
    return complex_from_document(doc)


async def _solve(args: argparse.Namespace) -> ExitCode:
    task, model = await _load_task(args.task), await _load_model(args)
    verdict = await asyncio.to_thread(solve, task, model, args.rounds, args.budget)
    sys.stdout.write(f"{type(verdict).__name__.lower()} ({verdict.explored} nodes)\n")
    if not isinstance(verdict, Solvable):
        return ExitCode.NEGATIVE
    if args.witness:
        await write_text(args.witness, dump_json(verdict.witness.to_document()))
    if args.speedup and args.rounds > 0:
        faster = speedup_transform(task, model, args.rounds, verdict.witness)
        await write_text(args.speedup, dump_json(faster.to_document()))
    return ExitCode.OK


async def _closure(args: argparse.Namespace) -> ExitCode:
    task, model = await _load_task(args.task), await _load_model(args)
    beta = await _load_beta(args.beta)
    if beta is not None:
        model = model.model_copy(update={"box": BlackBox.BINARY_CONSENSUS})
    closed = await ClosureEngine(model, args.threads, args.budget, beta).closure(task)
    await _emit(dump_json(task_to_document(closed)), args.out)
    return ExitCode.OK


async def _fixed_point(args: argparse.Namespace) -> ExitCode:
    task, model = await _load_task(args.task), await _load_model(args)
    fixed = await ClosureEngine(model, args.threads, args.budget).is_fixed_point(task)
    sys.stdout.write("fixed point\n" if fixed else "not a fixed point\n")
    return ExitCode.OK if fixed else ExitCode.NEGATIVE


async def _lower_bound(args: argparse.Namespace) -> ExitCode:
    task, model = await _load_task(args.task), await _load_model(args)
    engine = ClosureEngine(model, args.threads, args.budget)
    transform = engine.family_transform(args.factor) if args.factor else None
    bound = await engine.lower_bound_chain(task, transform, max_steps=args.max_steps)
    sys.stdout.write(f"lower bound: {bound}\n")
    return ExitCode.OK


async def _run_rule(args: argparse.Namespace) -> ExitCode:
    task, model = await _load_task(args.task), await _load_model(args)
    beta = await _load_beta(args.beta)
    rules = rule_schedule(RuleName(args.rule), task, args.rounds, beta)
    valid = await asyncio.to_thread(run_rule, task, model, args.rounds, rules)
    sys.stdout.write("valid\n" if valid else "invalid\n")
    return ExitCode.OK if valid else ExitCode.NEGATIVE


async def _verify_claims(args: argparse.Namespace) -> ExitCode:
    manifest = await load_manifest(args.manifest)
    claims = select_claims(manifest, args.filter)
    if not claims:
        _LOGGER.warning("No claim matches '%s'", args.filter)
        return ExitCode.OK
    outcomes = await ClaimRunner(args.threads, args.budget).run(claims)
    for outcome in outcomes:
        status = "PASS" if outcome.passed else "FAIL"
        sys.stdout.write(
            f"{status} {outcome.claim_id} ({outcome.detail}, {outcome.seconds:.2f}s)\n"
        )
    failed = sum(not outcome.passed for outcome in outcomes)
    sys.stdout.write(f"{len(outcomes) - failed}/{len(outcomes)} claims passed\n")
    return ExitCode.NEGATIVE if failed else ExitCode.OK


async def _export(args: argparse.Namespace) -> ExitCode:
    text = await read_text(args.input)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(f"{args.input} is not JSON: {err}") from err
    if isinstance(data, dict) and "kind" in data:
        task = await _load_task(args.input)
        complex_ = task.outputs
        rendered = {
            ExportFormat.JSON: lambda: dump_json(task_to_document(task)),
            ExportFormat.DOT: lambda: to_dot(complex_, "outputs"),
            ExportFormat.TABLE: lambda: delta_table(task),
        }
    else:
        complex_ = await _load_complex(args.input)
        n = max(complex_.ids)
        rendered = {
            ExportFormat.JSON: lambda: dump_json(complex_to_document(complex_, n)),
            ExportFormat.DOT: lambda: to_dot(complex_),
            ExportFormat.TABLE: lambda: "".join(f"{facet.label()}\n" for facet in complex_.facets),
        }
    await _emit(rendered[ExportFormat(args.format)](), args.out)
    return ExitCode.OK


COMMANDS = {
    "gen-protocol": _gen_protocol,
    "solve": _solve,
    "closure": _closure,
    "fixed-point": _fixed_point,
    "lower-bound": _lower_bound,
    "run-rule": _run_rule,
    "verify-claims": _verify_claims,
    "export": _export,
}


async def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return await COMMANDS[args.command](args)
    except (ResourceLimitError, StepBudgetExceededError) as err:
        _LOGGER.error("%s", err)
        return ExitCode.RESOURCE_LIMIT
    except (PyspeedupError, ValueError, OSError) as err:
        _LOGGER.error("%s", err)
        return ExitCode.USAGE


def run() -> None:
    """Console script entry point."""
    sys.exit(asyncio.run(main()))
