"""Utils functions for pyspeedup."""

import asyncio
from collections.abc import Callable, Sequence
import json
import logging
from pathlib import Path
from typing import TypeVar

import aiofiles
from pydantic import BaseModel

_LOGGER = logging.getLogger(__name__)

T = TypeVar("T")


async def gather_bounded(jobs: Sequence[Callable[[], T]], limit: int) -> list[T]:
    """Run blocking jobs in worker threads, at most ``limit`` at a time.
    Results keep the order of ``jobs``.
    """
    semaphore = asyncio.Semaphore(max(1, limit))

    async def run(job: Callable[[], T]) -> T:
        async with semaphore:
            return await asyncio.to_thread(job)

    return list(await asyncio.gather(*(run(job) for job in jobs)))


def dump_json(document: BaseModel) -> str:
    """Serialize a document with sorted keys, so equal documents give equal bytes."""
    return json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


async def read_text(path: str | Path) -> str:
    """Read a whole text file."""
    async with aiofiles.open(path, encoding="utf-8") as file:
        return await file.read()


async def write_text(path: str | Path, text: str) -> None:
    """Write a whole text file."""
    async with aiofiles.open(path, "w", encoding="utf-8") as file:
        await file.write(text)
    _LOGGER.debug("Wrote %s characters to %s", len(text), path)
