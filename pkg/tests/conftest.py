import json
from pathlib import Path

import numpy as np
import pytest

from fogsched import default_config
from fogsched.model import SlotState

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def slot_f1():
    doc = json.loads((FIXTURES / "slot_f1.json").read_text())
    cfg = default_config(**doc["config_overrides"])
    st = doc["state"]
    state = SlotState(t=0, **{k: np.array(v, dtype=float) for k, v in st.items()})
    return cfg, state, doc["eta_t"]


def make_state(cfg, *, q=None, s=None, z=None, gains=None, arrivals=None, t=0):
    n, m = cfg.num_wd, cfg.num_fog
    return SlotState(
        t=t,
        positions_fog=np.zeros((m, 2)),
        positions_wd=np.zeros((n, 2)),
        gains=np.full((n, m), 1e-10) if gains is None else np.asarray(gains, dtype=float),
        arrivals=np.zeros(n) if arrivals is None else np.asarray(arrivals, dtype=float),
        q_fog=np.zeros(m) if q is None else np.asarray(q, dtype=float),
        s_wd=np.zeros(n) if s is None else np.asarray(s, dtype=float),
        z_virtual=np.zeros(n) if z is None else np.asarray(z, dtype=float),
    )


# One PASS/FAIL line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
