import math

import mpmath as mp
import numpy as np
import pytest

from conewave.bessel import besselj_series, bessely_series, cross_product

mp.mp.dps = 30

ORDERS = (0.5j, 0.25j, complex(math.sqrt(1.75)), 1.3 + 0.7j)
ARGS = (0.3, 1.0, 2.052, 6.0, 11.0, 16.0)


@pytest.mark.parametrize("order", ORDERS)
def test_series_against_mpmath(order):
    for x in ARGS:
        mine = complex(besselj_series(order, x))
        ref = complex(mp.besselj(mp.mpc(order), x))
        assert abs(mine - ref) < 1e-9 * max(abs(ref), 1e-12)
        mine = complex(bessely_series(order, x))
        ref = complex(mp.bessely(mp.mpc(order), x))
        assert abs(mine - ref) < 1e-9 * max(abs(ref), 1e-12)


def test_vectorized_argument():
    x = np.array([0.5, 1.5, 3.0])
    vals = besselj_series(0.5j, x)
    assert vals.shape == x.shape
    assert complex(vals[1]) == pytest.approx(
        complex(besselj_series(0.5j, 1.5)), rel=1e-14)


# Tabulated coefficient ratios for the slope-1 cone channel eta=0: the
# combination J_d - (J_d(b)/Y_d(b)) Y_d kills the wave at the inner rim.
# Levels refined by the independent ODE route; ratios quoted to 4 digits.
_RATIO_ROWS = [
    # (aspect, c_n, printed ratio J_d(b)/Y_d(b))
    (1.5, 1.450851145125962, 0.2323 + 0.7231j),
    (1.5, 2.945649993278911, 0.2243 + 1.462j),
    (1.5, 4.431824717270451, -(0.3795 - 0.8787j)),
    (4.0, 0.523287382789419, -(0.3293 - 1.374j)),
    (4.0, 1.091265348422722, 0.4333 + 1.057j),
    (4.0, 1.652235598621668, 0.06785 + 0.6611j),
]


@pytest.mark.parametrize("aspect,c,expected", _RATIO_ROWS)
def test_rim_coefficient_ratios(aspect, c, expected):
    b = c * math.sqrt(2.0)
    ratio = complex(besselj_series(0.5j, b) / bessely_series(0.5j, b))
    assert abs(ratio - expected) < 1e-3 * abs(expected)


def test_cross_product_vanishes_at_levels():
    # quantization condition of the slope-1, aspect-1.5 cone
    for c in (1.450851145125962, 2.945649993278911, 4.431824717270451):
        b = c * math.sqrt(2.0)
        val = complex(cross_product(0.5j, b, b * 2.5))
        off = complex(cross_product(0.5j, b * 1.01, b * 1.01 * 2.5))
        assert abs(val) < 1e-10
        assert abs(off) > 1e-4


def test_cross_product_same_argument_is_zero():
    assert abs(complex(cross_product(0.5j, 2.0, 2.0))) < 1e-14


def test_domain_guards():
    with pytest.raises(ValueError):
        besselj_series(0.5j, -1.0)
    with pytest.raises(ValueError):
        besselj_series(0.5j, 25.0)
    with pytest.raises(ValueError):
        bessely_series(2.0, 1.0)        # integer order hits the reflection
