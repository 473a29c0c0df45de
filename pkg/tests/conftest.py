import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from mrfse import Alphabet, Sample, VertexSet  # noqa: E402


def make_sample(rows, k=2, names=None):
    rows = np.asarray(rows)
    p = rows.shape[1]
    vs = VertexSet(tuple(names)) if names else VertexSet.numbered(p)
    return Sample(Alphabet.of_size(k), vs, rows)


@pytest.fixture
def four_rows():
    return make_sample([(0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 1, 1)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
