"""Cylinder functions of complex order by power series.

scipy only evaluates Bessel functions of real order, but the azimuthally
symmetric channel of the cone problem needs orders like i/(2 lambda).
For the moderate arguments that occur there the ascending series is exact
enough and simple:

    J_nu(x) = sum_k (-1)^k / (k! Gamma(k+nu+1)) (x/2)^(2k+nu)      (DLMF 10.2.2)
    Y_nu(x) = (J_nu(x) cos(nu pi) - J_{-nu}(x)) / sin(nu pi)       (DLMF 10.2.3)

The reflection formula requires nu not to be an integer; every order
produced by the cone channels is either purely imaginary or a real
irrational, so this is only guarded, never hit.  Alternating-series
cancellation costs roughly x*log10(e) digits, so arguments are capped
where fewer than ~7 digits would survive in double precision.
"""

import math

import numpy as np
from scipy.special import gamma

_X_MAX = 20.0
_K_MAX = 200


def besselj_series(order: complex, x) -> np.ndarray:
    """J_order(x) for complex order and real x in (0, 20]."""
    order = complex(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("series evaluation needs x > 0")
    if np.any(x > _X_MAX):
        raise ValueError(f"series accuracy domain is x <= {_X_MAX}")
    half = 0.5 * x
    out = np.zeros(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex) / gamma(order + 1.0)
    for k in range(_K_MAX):
        out += term
        # ratio of consecutive terms: -x^2/4 / ((k+1)(k+1+nu))
        term = term * (-(half * half)) / ((k + 1.0) * (k + 1.0 + order))
        if np.all(np.abs(term) < 1e-18 * np.maximum(np.abs(out), 1e-300)):
            break
    return out * np.exp(order * np.log(half))


def bessely_series(order: complex, x) -> np.ndarray:
    """Y_order(x) via the reflection formula; order must not be an integer."""
    order = complex(order)
    if abs(order.imag) < 1e-9 and abs(order.real - round(order.real)) < 1e-6:
        raise ValueError("reflection formula is singular at integer orders")
    s = np.sin(np.pi * order)
    return (besselj_series(order, x) * np.cos(np.pi * order)
            - besselj_series(-order, x)) / s


def cross_product(order: complex, x_inner, x_outer):
    """J_nu(xo) Y_nu(xi) - Y_nu(xo) J_nu(xi).

    Vanishes when a combination of J and Y has zeros at both arguments;
    this is the closed-form quantization condition for an annular-type
    Dirichlet problem.  Real (up to roundoff) for purely imaginary or
    real order and real arguments.
    """
    ji = besselj_series(order, x_inner)
    yi = bessely_series(order, x_inner)
    jo = besselj_series(order, x_outer)
    yo = bessely_series(order, x_outer)
    return jo * yi - yo * ji


def log_cancellation_digits(x: float) -> float:
    """Decimal digits lost to alternating-series cancellation at argument x."""
    return x * math.log10(math.e)
