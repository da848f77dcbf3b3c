import math
import sys

import numpy as np
import pytest

from hv3d.synthetic import make_stereo_sequence, textured_plane


def brute_dct2(x):
    """O(n^4) orthonormal DCT-II straight from the definition."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    alpha = [math.sqrt(1.0 / n)] + [math.sqrt(2.0 / n)] * (n - 1)
    out = np.zeros((n, n))
    for k in range(n):
        for l in range(n):
            s = 0.0
            for i in range(n):
                ck = math.cos(math.pi * (2 * i + 1) * k / (2 * n))
                for j in range(n):
                    s += x[i, j] * ck * math.cos(math.pi * (2 * j + 1) * l / (2 * n))
            out[k, l] = alpha[k] * alpha[l] * s
    return out


@pytest.fixture(scope="session")
def plane():
    return textured_plane(192, 320, seed=3)


@pytest.fixture(scope="session")
def small_seq():
    return make_stereo_sequence(320, 192, frames=2, seed=5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
