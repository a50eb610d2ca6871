import random

import pytest

from permealab import crossings
from permealab.chains import scheme_gH

ATTACKER_SEED = 20240611
ATTACKER_COUNT = 200


@pytest.fixture(scope="session")
def gh():
    return scheme_gH()


@pytest.fixture(scope="session")
def attackers():
    rng = random.Random(ATTACKER_SEED)
    return [crossings.random_attacker(rng) for _ in range(ATTACKER_COUNT)]


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
