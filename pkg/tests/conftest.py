import numpy as np
import pytest

from sigre.path_model import PiecewiseLinearPath


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def lpath():
    return PiecewiseLinearPath.from_points([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])


def random_path(rng, d=2, segments=5, scale=1.0):
    pts = np.vstack([np.zeros(d), np.cumsum(scale * rng.standard_normal((segments, d)), axis=0)])
    return PiecewiseLinearPath(np.linspace(0.0, 1.0, segments + 1), pts)


# acceptance report: criterion -> list of (subcheck, ok, detail)
ACCEPTANCE: dict = {}


def record(criterion: int, name: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(ok), detail))
    print(f"criterion {criterion} [{name}]: {'PASS' if ok else 'FAIL'} {detail}")
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[c]
        ok = all(k[1] for k in checks)
        failed = [f"{n} ({d})" for n, good, d in checks if not good]
        line = f"criterion {c:2d}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  failed: " + "; ".join(failed)
        terminalreporter.write_line(line)
