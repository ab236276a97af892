import pytest

from mixerfirst import BasebandLoad, ComplexImpedanceSpec, MixerConfig, RgcParams

F_LO = 1e9
C_BB = 55e-12
R_MATCH = 274.6  # baseband R that matches 50 ohm with ra=50, rsw=5


@pytest.fixture
def cfg():
    return MixerConfig(ra_ohm=50.0, rsw_ohm=5.0, f_lo_hz=F_LO)


@pytest.fixture
def rc_spec():
    return ComplexImpedanceSpec(R_MATCH, C_BB)


@pytest.fixture
def rc_load():
    return BasebandLoad(R_MATCH, C_BB)


@pytest.fixture
def rgc():
    """Receiver-default RGC parameters (R_IN ~ 225 ohm at DC)."""
    return RgcParams(1e-3, 0.9e-3, 20e3, 10e3, 5e3, 20e-15, 10e3, c_bb_f=C_BB)


# acceptance reporting: one PASS/FAIL line per criterion at the end of the run
_criteria: dict = {}
_criterion_of: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, title = m.args
            _criterion_of[item.nodeid] = n
            _criteria.setdefault(n, {"title": title, "ok": True, "ran": False})


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    entry = _criteria[n]
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {e['title']}")
