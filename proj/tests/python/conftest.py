import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("RESKIT_BIN") or shutil.which("resilience-kit")
    if not path:
        pytest.skip("resilience-kit binary not found (set RESKIT_BIN)")
    return path


@pytest.fixture(scope="session")
def schemas():
    return pathlib.Path(os.environ.get("RESKIT_SCHEMAS", ROOT / "schemas"))
