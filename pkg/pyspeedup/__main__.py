"""Allow ``python -m pyspeedup``."""

from pyspeedup.cli import run

run()
