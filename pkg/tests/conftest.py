import time

import pytest

from majorana_u35 import gram, hsgraph, shapes

ACCEPTANCE = []


def record(n: int, name: str, ok: bool, detail: str = ""):
    ACCEPTANCE.append((n, name, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, name, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {name}  {detail}")


class Timed:
    def __init__(self):
        self.seconds = {}

    def run(self, key, fn):
        t0 = time.perf_counter()
        out = fn()
        self.seconds[key] = time.perf_counter() - t0
        return out


@pytest.fixture(scope="session")
def timings():
    return Timed()


@pytest.fixture(scope="session")
def groups(timings):
    return timings.run("groups", hsgraph.build_groups)


@pytest.fixture(scope="session")
def G(groups):
    return groups[2]


@pytest.fixture(scope="session")
def reg(G):
    return shapes.AxisRegistry(G)


@pytest.fixture(scope="session")
def shape(G, reg):
    return shapes.shape_of_group(G, reg)


@pytest.fixture(scope="session")
def labels(reg):
    return gram.pair_labels(reg)


@pytest.fixture(scope="session")
def M(G, shape, reg, labels):
    return gram.assemble_gram(G, shape, True, reg, labels)


@pytest.fixture(scope="session")
def rels(G, reg):
    return gram.pasechnik_vectors(G, reg)


@pytest.fixture(scope="session")
def gamma_minus(reg, labels):
    return gram.gamma_minus_orbits(0, reg, labels)
