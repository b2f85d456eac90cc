import os

import pytest
from hypothesis import HealthCheck, settings

from primereg import _pykernels
from primereg._backend import BACKEND, kernels

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def _backends():
    out = [pytest.param(_pykernels, id="python")]
    if BACKEND == "cython":
        out.append(pytest.param(kernels, id="cython"))
    return out


@pytest.fixture(params=_backends(), scope="module")
def backend(request):
    return request.param


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion; the summary is printed at the end of the run."""

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
