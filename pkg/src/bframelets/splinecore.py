"""Centered B-splines and univariate box splines.

``B_m`` is the centered B-spline of order ``m`` supported on ``[-m/2, m/2]``.
A univariate box spline ``B(x | Xi)`` with positive weights ``Xi = [a_1..a_k]``
is the convolution of the normalized centered boxes ``1/a_j 1_[-a_j/2, a_j/2)``;
with all weights equal to 1 it reduces to ``B_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod

import numpy as np

from ._rational import Q, SqrtRational, to_q
from .errors import InvalidInputError, InvalidOrderError
from .piecewise import PiecewisePolynomial, rational_gcd
from .quadrature import QuadratureConfig, fourier_inversion

__all__ = [
    "DirectionSet",
    "bspline_piecewise",
    "bspline_eval",
    "bspline_derivative_eval",
    "box_spline_fourier",
    "box_spline_piecewise",
    "box_spline_eval",
    "box_spline_eval_fourier_inversion",
    "piecewise_derivative",
    "recurrence_lift",
    "sinc",
]


def sinc(x):
    """Unnormalized ``sin(x)/x`` with ``sinc(0) = 1``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class DirectionSet:
    """Multiset of positive weights of a univariate box spline.

    Weights are kept as exact rationals (floats convert exactly), sorted in
    ascending order so equal multisets compare and hash equal.
    """

    weights: tuple

    def __init__(self, weights):
        ws = tuple(sorted(to_q(w) for w in weights))
        if any(w <= 0 for w in ws):
            raise InvalidInputError("box spline weights must be positive")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def framelet(cls, m: int, ell: int) -> DirectionSet:
        """``[1 x (m - ell), 1/2 x 2*ell]``: the box spline whose ``ell``-th
        derivative is the framelet of order ``m``."""
        return cls([1] * (m - ell) + [Q(1, 2)] * (2 * ell))

    @classmethod
    def discretization(cls, m: int, ell: int) -> DirectionSet:
        """``[1 x (m - ell), 1/2 x ell]``, the kernel of the discretization T_n."""
        return cls([1] * (m - ell) + [Q(1, 2)] * ell)

    def __len__(self):
        return len(self.weights)

    @property
    def support_length(self):
        return sum(self.weights, Q(0))

    @property
    def norm_squared(self) -> float:
        return float(sum((w * w for w in self.weights), Q(0)))

    def as_floats(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])


def _check_order(m, minimum=1):
    if int(m) != m or m < minimum:
        raise InvalidOrderError(f"order must be an integer >= {minimum}, got {m!r}")
    return int(m)


def recurrence_lift(p: PiecewisePolynomial, m: int, ell: int) -> PiecewisePolynomial:
    """One horizontal step of the framelet recurrence, order ``m -> m + 1``.

    ``p`` is the centered function of order ``m`` and index ``ell``. With
    ``ell = 0`` (``p = B_m``) this is the classical B-spline recurrence.
    """
    a = Q(1, m)
    left = p.shift(Q(-1, 2)).mul_affine(a, Q(m + 1, 2 * m))
    right = p.shift(Q(1, 2)).mul_affine(-a, Q(m + 1, 2 * m))
    out = left + right
    if ell:
        out = out + p * Q(ell, m)
    out = out.trim().with_scale(p.scale * SqrtRational(Q(m + 1, m + 1 - ell)))
    out.smoothness = p.smoothness + 1
    return out


@lru_cache(maxsize=None)
def bspline_piecewise(m: int) -> PiecewisePolynomial:
    """Exact ``B_m`` built by the recurrence from ``B_1 = 1_[-1/2, 1/2)``."""
    m = _check_order(m)
    p = PiecewisePolynomial(Q(-1, 2), Q(1, 2), [[1], [1]], smoothness=0)
    for k in range(1, m):
        p = recurrence_lift(p, k, 0)
    return p


def bspline_eval(m: int, x):
    """``B_m(x)``."""
    return bspline_piecewise(m)(x)


def bspline_derivative_eval(m: int, x):
    """``B_m'(x) = B_{m-1}(x + 1/2) - B_{m-1}(x - 1/2)``; needs ``m >= 2``."""
    m = _check_order(m, 2)
    x = np.asarray(x, dtype=float)
    b = bspline_piecewise(m - 1)
    out = b(x + 0.5) - b(x - 0.5)
    return float(out) if np.ndim(out) == 0 else out


def box_spline_fourier(dirs: DirectionSet, omega):
    """``prod_j sinc(a_j * omega / 2)``."""
    w = np.asarray(omega, dtype=float)
    out = np.ones_like(w)
    for a in dirs.as_floats():
        out = out * sinc(a * w / 2)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _box_chain(weights: tuple) -> PiecewisePolynomial:
    if len(weights) == 1:
        return PiecewisePolynomial.box(weights[0])
    return _box_chain(weights[:-1]).convolve_box(weights[-1])


def _grid_step(weights) -> Q:
    h = weights[0]
    for w in weights[1:]:
        h = rational_gcd(h, w)
    return h


@lru_cache(maxsize=None)
def _box_truncated_powers(weights: tuple) -> PiecewisePolynomial:
    # B(x|Xi) = prod_j(centered difference of width a_j) x_+^(k-1) / ((k-1)! prod a_j).
    # With a_j = n_j * h, piece i (u = local variable) is
    #   Q_i(u) = sum_{s <= i} c_s (u + i - s)^(k-1),  c_s = [z^s] prod_j (1 - z^(n_j)),
    # so Q_i(u) = Q_{i-1}(u + 1) + c_i u^(k-1): integer Taylor shifts by 1 only.
    k = len(weights)
    h = _grid_step(weights)
    ns = [int(w / h) for w in weights]
    total = sum(ns)
    c = [1] + [0] * total
    for n in ns:
        for s in range(total, n - 1, -1):
            c[s] -= c[s - n]
    deg = k - 1
    poly = [0] * (deg + 1)
    rows = []
    for i in range(total):
        for a in range(deg):
            for b in range(deg - 1, a - 1, -1):
                poly[b] += poly[b + 1]
        poly[deg] += c[i]
        rows.append(list(poly))
    denom = factorial(deg) * h * prod(ns)
    pieces = [[Q(v) / denom for v in row] for row in rows]
    return PiecewisePolynomial(-total * h / 2, h, pieces, smoothness=k - 1)


def box_spline_piecewise(dirs: DirectionSet, method: str = "auto") -> PiecewisePolynomial:
    """Exact piecewise form of ``B(. | dirs)``.

    ``method="convolution"`` convolves normalized boxes one at a time via the
    antiderivative difference; weights go in ascending order so prefixes are
    shared between calls. ``method="truncated-power"`` expands the centered
    difference of the truncated power in integer arithmetic, which stays fast
    for hundreds of directions. ``"auto"`` picks convolution up to 24
    directions.
    """
    if not isinstance(dirs, DirectionSet):
        dirs = DirectionSet(dirs)
    if len(dirs) == 0:
        raise InvalidInputError("a box spline needs at least one direction")
    h = _grid_step(dirs.weights)
    if dirs.support_length / h > 100_000:
        raise InvalidInputError("weights are not commensurable on a practical grid")
    if method == "auto":
        method = "convolution" if len(dirs) <= 24 else "truncated-power"
    if method == "convolution":
        return _box_chain(dirs.weights)
    if method == "truncated-power":
        return _box_truncated_powers(dirs.weights)
    raise InvalidInputError(f"unknown box spline method {method!r}")


def box_spline_eval(dirs: DirectionSet, x):
    """``B(x | dirs)`` evaluated from the exact piecewise form."""
    return box_spline_piecewise(dirs)(x)


def _box_tail_terms(dirs: DirectionSet) -> dict:
    # prod_j sinc(a_j w / 2) = w^-k prod_j (exp(i a_j w/2) - exp(-i a_j w/2)) / (i a_j)
    terms = {Q(0): complex(1.0)}
    for a in dirs.weights:
        c = 1.0 / (1j * float(a))
        nxt: dict = {}
        for r, v in terms.items():
            for sgn in (1, -1):
                key = r + sgn * a / 2
                nxt[key] = nxt.get(key, 0j) + sgn * c * v
        terms = {r: v for r, v in nxt.items() if v != 0}
    return {float(r): v for r, v in terms.items()}


def box_spline_eval_fourier_inversion(dirs: DirectionSet, x, quad: QuadratureConfig | None = None):
    """``B(x | dirs)`` by numerically inverting ``box_spline_fourier``.

    Independent of the piecewise construction; the tail beyond the truncation
    radius is integrated exactly from the trigonometric expansion of the
    product of sines.
    """
    if not isinstance(dirs, DirectionSet):
        dirs = DirectionSet(dirs)
    quad = quad or QuadratureConfig()
    return fourier_inversion(
        lambda w: box_spline_fourier(dirs, w), _box_tail_terms(dirs), len(dirs), x, quad
    )


def piecewise_derivative(p: PiecewisePolynomial, order: int) -> PiecewisePolynomial:
    """Exact ``order``-th derivative; raises ``SmoothnessError`` when too rough."""
    return p.derivative(order)
