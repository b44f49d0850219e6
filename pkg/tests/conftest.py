import functools
import os
import sys

import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)

from linfgeom.cli import example_path  # noqa: E402
from linfgeom.fedosov import solve  # noqa: E402
from linfgeom.spec_io import load_spec  # noqa: E402

CORPUS = ["zero", "so3_bundle", "so2_plane", "so2_curved", "affine_line", "metric_plane", "weil_plane"]
VALID = CORPUS
INVALID = ["jacobi_violator"]


def data_path(name: str) -> str:
    return os.path.join(HERE, "data", name)


@functools.lru_cache(maxsize=None)
def spec(name: str):
    """A bundled spec by stem, or a file under tests/data."""
    if name.endswith(".spec"):
        return load_spec(data_path(name))
    return load_spec(str(example_path(name)))


@functools.lru_cache(maxsize=None)
def solved(name: str, N: int = 4):
    return solve(spec(name), N)


ACCEPTANCE = {}


def record(criterion: int, ok: bool, note: str = ""):
    ACCEPTANCE[criterion] = (ok, note)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {note}")


@pytest.fixture
def solved_state():
    return solved
