import numpy as np
import pytest

from spinning_top.agents import build_empirical_payoff, sample_agent_grid
from spinning_top.games import tictactoe

# criterion id -> list of (check name, passed, detail); filled by test_acceptance
CRITERIA: dict[str, list] = {}


@pytest.fixture(scope="session")
def ttt_small():
    """Tic-Tac-Toe empirical game from the reduced agent grid."""
    return build_empirical_payoff(tictactoe(), sample_agent_grid("small"))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(CRITERIA, key=lambda c: (int(c.split("-")[0]), c)):
        checks = CRITERIA[cid]
        ok = all(passed for _, passed, _ in checks)
        detail = "; ".join(f"{name}: {'ok' if passed else 'FAIL'} ({info})" for name, passed, info in checks)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail}")


def random_antisymmetric(g: np.random.Generator, n: int, sign: bool = False) -> np.ndarray:
    A = g.uniform(-1, 1, size=(n, n))
    A = A - A.T
    return np.sign(A) if sign else A
