import numpy as np
import pytest

from dskg.geometry import chart_for, sample_domain
from dskg.lie_core import PARAMETERIZED_CASES


DEFAULT_A = 1.0


def case_param_a(case):
    return DEFAULT_A if case in PARAMETERIZED_CASES else None


def chart_points(case, n=25, seed=9041, a=None, margin=0.1):
    """Seeded interior samples of a case's chart box."""
    a = a if a is not None else case_param_a(case)
    chart = chart_for(case, a)
    rng = np.random.default_rng(seed)
    return sample_domain(chart, n, rng, margin)


@pytest.fixture
def rng():
    return np.random.default_rng(20813)
