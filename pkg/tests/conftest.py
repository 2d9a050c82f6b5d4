import io
import shutil
from pathlib import Path

import pytest

from lamsh.engine.typesys import ResolutionMode
from lamsh.prelude import install_prelude
from lamsh.shell.session import Session

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def prelude_env():
    """The standard environment; immutable, so one per test run."""
    return install_prelude()


@pytest.fixture
def session(prelude_env):
    return Session(env=prelude_env, mode=ResolutionMode.REPL, out=io.StringIO(), err=io.StringIO())


@pytest.fixture
def script_session(prelude_env):
    return Session(env=prelude_env, mode=ResolutionMode.SCRIPT, out=io.StringIO(), err=io.StringIO())


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def require_tools(*names: str):
    """Skip marker for tests that run POSIX tools."""
    missing = [name for name in names if shutil.which(name) is None]
    return pytest.mark.skipif(bool(missing), reason=f"missing tools: {', '.join(missing)}")


@pytest.fixture
def csv_path(fixtures_dir) -> Path:
    return fixtures_dir / "sample.csv"
