import numpy as np
import pytest

from frontkit.germ import NormalFormGerm
from frontkit.series import TruncatedSeries1, TruncatedSeries2


@pytest.fixture
def rng():
    return np.random.default_rng(20240913)


def random_series2(rng, degree, scale=1.0, zero_constant=False):
    c = rng.uniform(-scale, scale, size=(degree + 1, degree + 1))
    s = TruncatedSeries2(degree, c)
    if zero_constant:
        c = np.array(s.coeffs)
        c[0, 0] = 0.0
        s = TruncatedSeries2(degree, c)
    return s


def random_series1(rng, degree, scale=1.0):
    return TruncatedSeries1(degree, rng.uniform(-scale, scale, size=degree + 1))


def random_normal_form(
    rng,
    degree=7,
    a_range=(0.2, 5.0),
    coeff_scale=2.0,
    positive_c=True,
    c0_range=None,
):
    """Random normal-form data; c1(0), c3(0) kept away from zero when
    positive_c so the germ is a front with a unique canonical jet."""
    a = rng.uniform(*a_range)
    b1 = random_series1(rng, degree - 3, coeff_scale)
    b3 = random_series1(rng, degree - 3, coeff_scale)
    c1 = random_series1(rng, degree - 3, coeff_scale)
    c3 = random_series1(rng, degree - 3, coeff_scale)
    if positive_c:
        lo, hi = c0_range if c0_range is not None else (0.2, coeff_scale)
        c1 = TruncatedSeries1(
            degree - 3, np.concatenate([[rng.uniform(lo, hi)], c1.coeffs[1:]])
        )
        c3 = TruncatedSeries1(
            degree - 3, np.concatenate([[rng.uniform(lo, hi)], c3.coeffs[1:]])
        )
    b2 = random_series2(rng, degree - 4, coeff_scale)
    c2 = random_series2(rng, degree - 4, coeff_scale)
    return NormalFormGerm(a, b1, b2, b3, c1, c2, c3, degree=degree)


@pytest.fixture
def model_nf():
    """The model germ (u^2 - v^2, u^2 + v^2, u^3 + v^3)."""
    return NormalFormGerm.from_scalars(a=1.0, c1=1.0, c3=1.0, degree=7)


@pytest.fixture
def f1_nf():
    """b = c = u^3 + v^3: both top edges positively curved."""
    return NormalFormGerm.from_scalars(a=1.0, b1=1.0, b3=1.0, c1=1.0, c3=1.0, degree=7)


@pytest.fixture
def f2_nf():
    """b = u^3 - v^3: mixed singular-curvature signs."""
    return NormalFormGerm.from_scalars(a=1.0, b1=1.0, b3=-1.0, c1=1.0, c3=1.0, degree=7)


@pytest.fixture
def focal_example_nf():
    """The worked focal-locus example germ: a=2, b1=1, b3=1+4v, c1=1+u, c3=1+v."""
    degree = 7
    mk = lambda coeffs: TruncatedSeries1(degree - 3, coeffs)
    return NormalFormGerm(
        a=2.0,
        b1=mk([1.0]),
        b2=TruncatedSeries2(degree - 4),
        b3=mk([1.0, 4.0]),
        c1=mk([1.0, 1.0]),
        c2=TruncatedSeries2(degree - 4),
        c3=mk([1.0, 1.0]),
        degree=degree,
    )
