import sys

import numpy as np
import pytest

from nbldpc.code_builder import CheckMatrix, CodeParams, GeneratorMatrix, build_code
from nbldpc.gfp import FieldSpec

# p=3, l=6, m=3 code; seed 12 gives minimum distance 3 (most seeds give 2)
TINY = dict(p=3, l=6, m=3, d_v=2, d_c=4, seed=12)


@pytest.fixture(scope="session")
def gf3():
    return FieldSpec(3)


@pytest.fixture(scope="session")
def worked_pair(gf3):
    """The 2x4 GF(3) example: H_G = [[1,0,2,1],[0,1,1,2]] and a matching H_C."""
    g = GeneratorMatrix(gf3, 2, 4, [[2, 1], [1, 2]])
    # H_C = [-P^T | I] = [[1,2,1,0],[2,1,0,1]]
    h = CheckMatrix.from_dense(gf3, [[1, 2, 1, 0], [2, 1, 0, 1]])
    return g, h


@pytest.fixture(scope="session")
def tiny_code():
    t = TINY
    g, h, _ = build_code(CodeParams(FieldSpec(t["p"]), t["l"], t["m"], t["d_v"], t["d_c"], t["seed"]))
    return g, h


@pytest.fixture(scope="session")
def mid_code():
    g, h, _ = build_code(CodeParams(FieldSpec(3), 256, 192, 3, 12, 5))
    return g, h


@pytest.fixture(scope="session")
def code_1280():
    g, h, _ = build_code(CodeParams(FieldSpec(3), 1280, 1024, 3, 15, 7))
    return g, h


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
