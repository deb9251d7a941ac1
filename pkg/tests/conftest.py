import math

import pytest

from signpoisson import Disk, rasterize, torsion_field

UNIT_DISK = Disk((0.0, 0.0), 1.0)
R_C = 0.432067


@pytest.fixture(scope="session")
def disk64():
    return rasterize(UNIT_DISK, 1 / 64)


@pytest.fixture(scope="session")
def disk128():
    return rasterize(UNIT_DISK, 1 / 128)


@pytest.fixture(scope="session")
def disk256():
    return rasterize(UNIT_DISK, 1 / 256)


@pytest.fixture(scope="session")
def torsion128(disk128):
    return torsion_field(disk128, method="direct")


def disk_mass(r):
    return math.pi * r * r


# acceptance bookkeeping: one summary line per criterion at the end of the run
_CRITERIA: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, label: str, ok: bool, detail: str = "") -> bool:
        _CRITERIA.setdefault(criterion, []).append((label, bool(ok), detail))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        checks = _CRITERIA[n]
        status = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        parts = "; ".join(f"{lab}{'' if ok else ' [FAILED]'}: {det}" for lab, ok, det in checks)
        terminalreporter.write_line(f"criterion {n}: {status} -- {parts}")
