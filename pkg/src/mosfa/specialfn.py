r"""Ordinary and generalized (two-argument) Bessel functions of integer order.

The generalized Bessel function is fixed by its generating function

.. math::
    e^{i(u \sin\theta + v \sin 2\theta)} = \sum_n J_n(u, v) e^{in\theta},

which gives the series :math:`J_n(u, v) = \sum_k J_{n-2k}(u) J_k(v)`. Under it
:math:`J_n(-u, v) = (-1)^n J_n(u, v)`, so squared amplitudes do not depend on
the sign attached to the field-direction projection. Flipping the sign of the
``sin 2θ`` term maps orders as :math:`J_n(u, -v) = (-1)^n J_{-n}(u, v)`; this
changes ``J_n^2`` at fixed ``n``, so callers must use the sign their phase
actually carries (see ``mosfa.sfa_rates.volkov_bessel``).

Ordinary Bessel rows are built by downward recurrence from a start order well
above both the requested orders and the argument, normalized with
:math:`J_0 + 2\sum_k J_{2k} = 1`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_BIG = 1e200
_SMALL_X = 1e-3
# dropped terms of the k-series are below this in absolute value
_TERM_FLOOR = 1e-18


@dataclass(frozen=True)
class GenBesselEval:
    order: int
    arg_u: float
    arg_v: float
    value: float
    truncation_terms: int


def _start_order(m_max: int, xmax: float) -> int:
    top = max(m_max, int(math.ceil(xmax)))
    start = top + 30 + int(math.sqrt(40.0 * (top + 1)))
    return start + (start % 2)


def _series_row(m_max: int, x: np.ndarray) -> np.ndarray:
    # power series, only used for |x| < 1e-3 where five terms are exact to rounding
    m = np.arange(m_max + 1)[:, None]
    half = x[None, :] / 2.0
    out = np.zeros((m_max + 1, x.size))
    for j in range(5):
        logc = -math.lgamma(j + 1) - np.array([math.lgamma(mm + j + 1) for mm in range(m_max + 1)])
        out += (-1) ** j * np.exp(logc)[:, None] * half ** (2 * j + m)
    return out


def _miller_row(m_max: int, ax: np.ndarray) -> np.ndarray:
    """J_0..J_{m_max} at positive arguments ``ax`` (1D array)."""
    start = _start_order(m_max, float(ax.max()))
    out = np.zeros((m_max + 1, ax.size))
    j_next = np.zeros_like(ax)
    j_cur = np.full_like(ax, 1e-30)
    norm = np.zeros_like(ax)
    two_over_x = 2.0 / ax
    for m in range(start, 0, -1):
        if m <= m_max:
            out[m] = j_cur
        if m % 2 == 0:
            norm += 2.0 * j_cur
        j_prev = m * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _BIG
        if big.any():
            j_cur[big] /= _BIG
            j_next[big] /= _BIG
            norm[big] /= _BIG
            out[:, big] /= _BIG
    out[0] = j_cur
    norm += j_cur
    return out / norm


def bessel_row(m_max: int, x) -> np.ndarray:
    """Ordinary Bessel functions J_0..J_{m_max} at every x.

    Returns an array of shape ``(m_max + 1,) + np.shape(x)``. Negative
    arguments use ``J_m(-x) = (-1)^m J_m(x)``.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    ax = np.abs(flat)
    out = np.empty((m_max + 1, flat.size))
    small = ax < _SMALL_X
    if small.any():
        out[:, small] = _series_row(m_max, ax[small])
    if (~small).any():
        out[:, ~small] = _miller_row(m_max, ax[~small])
    neg = flat < 0
    if neg.any():
        out[1::2, neg] *= -1.0
    return out.reshape((m_max + 1,) + x.shape)


def bessel_j(m: int, x):
    """Bessel function of the first kind of integer order ``m``.

    Parameters
    ----------
    m : int
        Order, any sign (``J_{-m} = (-1)^m J_m``).
    x : float or array_like
        Real argument(s).
    """
    m = int(m)
    row = bessel_row(abs(m), x)[abs(m)]
    if m < 0 and m % 2:
        row = -row
    if np.ndim(x) == 0:
        return float(row)
    return row


def _signed_orders(row: np.ndarray, orders: np.ndarray) -> np.ndarray:
    # pick J_m for possibly negative m out of a nonnegative-order row
    vals = row[np.abs(orders)]
    odd_neg = (orders < 0) & (orders % 2 == 1)
    vals[odd_neg] *= -1.0
    return vals


def _v_terms(v: float):
    """Nonnegligible J_k(v): returns (k values, J_k(v))."""
    kmax = int(math.ceil(abs(v))) + 40
    row = bessel_row(kmax, v)
    ks = np.arange(-kmax, kmax + 1)
    jk = _signed_orders(row, ks)
    keep = np.abs(jk) > _TERM_FLOOR
    if not keep.any():
        return ks[kmax:kmax + 1], jk[kmax:kmax + 1]
    idx = np.nonzero(keep)[0]
    sl = slice(idx[0], idx[-1] + 1)
    return ks[sl], jk[sl]


def gen_bessel_many(n: int, u, v: float) -> np.ndarray:
    """J_n(u, v) for a fixed order and second argument over an array of u."""
    u = np.asarray(u, dtype=float)
    ks, jk = _v_terms(v)
    orders = n - 2 * ks
    m_max = int(np.abs(orders).max())
    row = bessel_row(m_max, u.ravel())
    terms = _signed_orders(row, orders)  # shape (len(ks), u.size)
    return (jk @ terms).reshape(u.shape)


def gen_bessel_eval(n: int, u: float, v: float) -> GenBesselEval:
    ks, jk = _v_terms(v)
    orders = n - 2 * ks
    row = bessel_row(int(np.abs(orders).max()), np.array([u]))[:, 0]
    value = float(np.dot(jk, _signed_orders(row, orders)))
    return GenBesselEval(int(n), float(u), float(v), value, int(ks.size))


def gen_bessel(n: int, u: float, v: float) -> float:
    """Generalized Bessel function J_n(u, v) = sum_k J_{n-2k}(u) J_k(v)."""
    return gen_bessel_eval(n, u, v).value


def gen_bessel_row(n_min: int, n_max: int, u: float, v: float) -> np.ndarray:
    """J_n(u, v) for n = n_min..n_max inclusive, sharing one Bessel row in u."""
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    ks, jk = _v_terms(v)
    ns = np.arange(n_min, n_max + 1)
    orders = ns[:, None] - 2 * ks[None, :]
    row = bessel_row(int(np.abs(orders).max()), np.array([u]))[:, 0]
    vals = row[np.abs(orders)]
    vals = np.where((orders < 0) & (orders % 2 == 1), -vals, vals)
    return vals @ jk


def parseval_cut(u: float, v: float) -> int:
    """Order beyond which J_n(u, v) is negligible on both sides."""
    return int(math.ceil(abs(u) + 2.0 * abs(v))) + 40


def generating_integral(n: int, u: float, v: float, points: int = 2048) -> float:
    """J_n(u, v) from the generating function by periodic trapezoid rule.

    Independent of the series route; aliasing error is of order
    J_{n +- points}(u, v).
    """
    theta = 2.0 * np.pi * np.arange(points) / points
    return float(np.mean(np.cos(u * np.sin(theta) + v * np.sin(2.0 * theta) - n * theta)))
