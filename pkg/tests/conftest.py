import numpy as np
import pytest

from refnet.model import CALIBRATION, NetworkParams


@pytest.fixture
def calib():
    return CALIBRATION


@pytest.fixture
def base08():
    return NetworkParams.uniform(0.8, 0.8)


def random_params(rng: np.random.Generator, equal: bool = False, alpha_low: float = 0.5) -> NetworkParams:
    delta = rng.uniform(0.5, 1.0)
    while delta <= 0.5:
        delta = rng.uniform(0.5, 1.0)
    alpha = 1.0 - rng.uniform(0.0, 1.0 - alpha_low)  # (alpha_low, 1]
    if alpha <= 0.5:
        alpha = 0.75
    tau = 1.0 - rng.uniform(0.0, 1.0, size=2)  # (0, 1]
    psi = rng.uniform(0.5, 1.0, size=2)
    if equal:
        tau[1], psi[1] = tau[0], psi[0]
    return NetworkParams(delta, alpha, tau[0], tau[1], psi[0], psi[1])


# --- acceptance reporting: one PASS/FAIL line per criterion -----------------

_criteria: dict[str, list[bool]] = {}
_titles: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    key, title = getattr(report, "_criterion", (None, None))
    if key is None:
        return
    _titles[key] = title
    _criteria.setdefault(key, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result()._criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: (int("".join(c for c in k if c.isdigit()) or 0), k)):
        status = "PASS" if all(_criteria[key]) else "FAIL"
        terminalreporter.write_line(f"criterion {key:<3} {status}  {_titles[key]}")
