import logging

import numpy as np
import pytest
from hypothesis import strategies as st

from tnest.graph import from_contacts, random_temporal_graph

ACCEPTANCE_LINES = []


@st.composite
def temporal_graphs(draw, max_nodes=7, max_times=4, directed=None, max_contacts=20):
    """Small temporal graphs; unused timestamps simply disappear."""
    n = draw(st.integers(2, max_nodes))
    if directed is None:
        directed = draw(st.booleans())
    contact = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                        st.integers(0, max_times - 1)).filter(lambda c: c[0] != c[1])
    contacts = draw(st.lists(contact, min_size=1, max_size=max_contacts))
    us, vs, ts = zip(*contacts)
    return from_contacts(us, vs, [10 * t + 3 for t in ts], n, directed)


def make_graphs(n, seed, max_nodes=10, max_times=4, probs=(0.1, 0.3, 0.6), directed=None):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        d = (len(out) % 2 == 0) if directed is None else directed
        g = random_temporal_graph(int(rng.integers(2, max_nodes + 1)),
                                  int(rng.integers(1, max_times + 1)),
                                  float(rng.choice(probs)), d, rng)
        if g is not None:
            out.append(g)
    return out


@pytest.fixture
def small_graphs():
    return make_graphs(30, seed=1234)


@pytest.fixture(autouse=True)
def _quiet_katz_warnings():
    logging.getLogger("tnest.measures").setLevel(logging.ERROR)
    yield
    logging.getLogger("tnest.measures").setLevel(logging.NOTSET)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
