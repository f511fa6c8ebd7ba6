"""Framelet analysis coefficients, the difference-operator identity and Parseval checks.

Coefficients are ``<f, psi_{l,n,k}>`` with ``psi_{l,n,k}(x) = 2^(n/2) psi_l(2^n x - k)``.
After the substitution ``u = 2^n x - k`` every inner product becomes
``2^(-n/2) int f((u + k) / 2^n) K(u) du`` for a fixed kernel ``K``. That integral
runs over Gauss-Legendre panels aligned to the kernel's breakpoints and
vectorized over ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, comb, floor, sqrt
from typing import Callable

import numpy as np

from ._parallel import ordered_map
from .errors import InvalidInputError, QuadratureError, UnsupportedCaseError
from .framelets import FrameletId, framelet_piecewise
from .gaussian import GaussianFrameletId, gaussian_framelet_eval
from .piecewise import PiecewisePolynomial
from .quadrature import QuadratureConfig, panel_nodes
from .splinecore import DirectionSet, box_spline_piecewise

__all__ = [
    "TestFunction",
    "IndexBox",
    "TEST_FUNCTIONS",
    "get_test_function",
    "framelet_coefficient",
    "framelet_coefficients",
    "gaussian_coefficients",
    "discretize_Tn",
    "difference_quarter",
    "coefficient_via_difference",
    "parseval_ratio",
    "parseval_ratio_gaussian",
    "reconstruct_partial",
    "coefficient_table",
]


@dataclass(frozen=True)
class TestFunction:
    """A real function with an (effective) support interval.

    ``breakpoints`` lists points where the function is not smooth; quadrature
    panels are aligned to them. ``smoothness`` is a descriptive tag.
    """

    __test__ = False  # not a pytest class

    name: str
    evaluator: Callable
    support: tuple
    smoothness: str = "C-infinity"
    breakpoints: tuple = ()

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def norm_squared(self, quad: QuadratureConfig | None = None) -> float:
        quad = quad or QuadratureConfig()
        a, b = self.support
        edges = sorted({a, b, *[t for t in self.breakpoints if a < t < b]})
        nodes, weights = panel_nodes(edges, quad.order, min(quad.panel_width, 0.125))
        return float(np.sum(weights * self(nodes) ** 2))

    def normalized(self, quad: QuadratureConfig | None = None) -> TestFunction:
        c = 1.0 / sqrt(self.norm_squared(quad))
        ev = self.evaluator
        return TestFunction(self.name, lambda x: c * ev(x), self.support, self.smoothness, self.breakpoints)

    def scaled(self, alpha: float) -> TestFunction:
        ev = self.evaluator
        return TestFunction(self.name, lambda x: alpha * ev(x), self.support, self.smoothness, self.breakpoints)

    def __add__(self, other: TestFunction) -> TestFunction:
        f, g = self.evaluator, other.evaluator
        support = (min(self.support[0], other.support[0]), max(self.support[1], other.support[1]))
        return TestFunction(
            f"{self.name}+{other.name}",
            lambda x: f(x) + g(x),
            support,
            self.smoothness if self.smoothness == other.smoothness else "mixed",
            tuple(sorted({*self.breakpoints, *other.breakpoints})),
        )

    @classmethod
    def from_piecewise(cls, name: str, p: PiecewisePolynomial, n: int = 0, k: int = 0) -> TestFunction:
        """``x -> 2^(n/2) p(2^n x - k)`` with its breakpoints."""
        s = 2.0**n
        lo, hi = (float(t) for t in p.support)
        bps = tuple((float(t) + k) / s for t in p.breakpoints)
        return cls(
            name,
            lambda x: sqrt(s) * p(s * x - k),
            ((lo + k) / s, (hi + k) / s),
            f"C^{max(p.smoothness - 1, 0)}",
            bps,
        )


def _bump(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
    return out


TEST_FUNCTIONS = {
    "gaussian": TestFunction("gaussian", lambda x: np.exp(-x * x), (-7.0, 7.0)),
    "bump": TestFunction("bump", _bump, (-1.0, 1.0)),
    "chirp": TestFunction("chirp", lambda x: np.cos(2 * x * x) * np.exp(-x * x / 2), (-10.0, 10.0)),
    "ramp": TestFunction("ramp", lambda x: x * np.exp(-x * x / 2), (-10.0, 10.0)),
}


def get_test_function(name: str, normalized: bool = False) -> TestFunction:
    try:
        f = TEST_FUNCTIONS[name]
    except KeyError as exc:
        raise InvalidInputError(
            f"unknown test function {name!r}; choose from {sorted(TEST_FUNCTIONS)}"
        ) from exc
    return f.normalized() if normalized else f


@dataclass(frozen=True)
class IndexBox:
    """Scales ``n_min <= n <= n_max``; translates per scale.

    ``k_ranges`` maps a scale to an inclusive ``(k_min, k_max)``; scales not in
    the map use every ``k`` whose framelet support meets the support of ``f``.
    """

    n_min: int
    n_max: int
    k_ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_min > self.n_max + 1:
            raise InvalidInputError("n_min must not exceed n_max + 1")

    @property
    def scales(self) -> range:
        return range(self.n_min, self.n_max + 1)

    @property
    def empty(self) -> bool:
        return self.n_min > self.n_max

    def translates(self, n: int, kernel_support, f_support) -> np.ndarray:
        if n in self.k_ranges:
            lo, hi = self.k_ranges[n]
            return np.arange(lo, hi + 1)
        a, b = kernel_support
        s = 2.0**n
        # supp psi_{n,k} = [(a+k)/2^n, (b+k)/2^n] meets [F0, F1]
        lo = ceil(s * f_support[0] - b)
        hi = floor(s * f_support[1] - a)
        return np.arange(lo, hi + 1)

    def to_dict(self) -> dict:
        return {"n_min": self.n_min, "n_max": self.n_max,
                "k_ranges": {str(n): list(r) for n, r in self.k_ranges.items()}}


# -- kernel inner products ----------------------------------------------------


def _kernel_inner(f: TestFunction, kernel, breaks, n: int, ks, quad: QuadratureConfig, scale_factor=None):
    """``int f((u + k)/2^n) K(u) du`` for every ``k`` in ``ks``.

    ``breaks`` are the kernel breakpoints (u units). Panels are no wider than
    ``panel_width * min(1, 2^n)`` so that ``f`` is resolved at its own scale.
    """
    s = 2.0**n
    ks = np.asarray(ks, dtype=float)
    width = quad.panel_width * min(1.0, s)

    def run(w):
        if f.breakpoints:
            out = np.empty(ks.shape)
            for i, k in enumerate(ks):
                extra = [s * t - k for t in f.breakpoints if breaks[0] < s * t - k < breaks[-1]]
                nodes, weights = panel_nodes(sorted({*breaks, *extra}), quad.order, w)
                out[i] = np.sum(weights * kernel(nodes) * f((nodes + k) / s))
            return out
        nodes, weights = panel_nodes(breaks, quad.order, w)
        kw = weights * kernel(nodes)
        return f((nodes[None, :] + ks[:, None]) / s) @ kw

    out = run(width)
    if quad.check_error:
        alt = run(width / 2)
        err = float(np.max(np.abs(alt - out), initial=0.0))
        if err > quad.abs_tol:
            raise QuadratureError(f"panel refinement changed a coefficient by {err:.3e}")
    return out


def framelet_coefficients(f: TestFunction, fid: FrameletId, n: int, ks, quad: QuadratureConfig | None = None):
    """``<f, psi_{l,n,k}>`` for an array of translates ``ks``."""
    quad = quad or QuadratureConfig()
    p = framelet_piecewise(fid)
    breaks = [float(t) for t in p.breakpoints]
    return 2.0 ** (-n / 2) * _kernel_inner(f, p, breaks, n, ks, quad)


def framelet_coefficient(f: TestFunction, fid: FrameletId, n: int, k: int, quad: QuadratureConfig | None = None) -> float:
    """``<f, psi_{l,n,k}>`` by panel quadrature aligned to the framelet knots."""
    return float(framelet_coefficients(f, fid, n, [k], quad)[0])


def _gaussian_extent(gid: GaussianFrameletId) -> float:
    # |G| < 1e-18 * max beyond this radius (Hermite factor included generously)
    return sqrt((45.0 + 2.0 * gid.ell) / gid.rate) + 1.0


def gaussian_coefficients(f: TestFunction, gid: GaussianFrameletId, n: int, ks, quad: QuadratureConfig | None = None):
    """``<f, G_{l,n,k}>`` over the effective support of ``G_l^(m)``."""
    quad = quad or QuadratureConfig()
    c = (gid.m % 2) / 2
    r = _gaussian_extent(gid)
    breaks = list(np.arange(floor(c - r), ceil(c + r) + 1, 1.0))
    return 2.0 ** (-n / 2) * _kernel_inner(f, lambda u: gaussian_framelet_eval(gid, u), breaks, n, ks, quad)


def discretize_Tn(f: TestFunction, m: int, ell: int, n: int, x, quad: QuadratureConfig | None = None):
    """``T_n f(x) = 2^(n/2) int f((x + t)/2^n) B(t | [1 x (m - l), 1/2 x l]) dt``."""
    quad = quad or QuadratureConfig()
    if not 0 <= ell <= m or m < 1 or (m - ell == 0 and ell == 0):
        raise InvalidInputError("need 0 <= l <= m with m >= 1")
    b = box_spline_piecewise(DirectionSet.discretization(m, ell))
    breaks = [float(t) for t in b.breakpoints]
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = 2.0 ** (n / 2) * _kernel_inner(f, b, breaks, n, xs, quad)
    return float(out[0]) if np.ndim(x) == 0 else out


def difference_quarter(g, order: int, x):
    """``Delta^l g(x)`` with ``Delta g(x) = g(x + 1/4) - g(x - 1/4)``."""
    if order < 0 or int(order) != order:
        raise InvalidInputError("difference order must be a nonnegative integer")
    x = np.asarray(x, dtype=float)
    out = 0.0
    for j in range(order + 1):
        out = out + (-1) ** j * comb(order, j) * np.asarray(g(x + (order - 2 * j) / 4))
    return float(out) if np.ndim(out) == 0 else out


def coefficient_via_difference(f: TestFunction, fid: FrameletId, n: int, k, quad: QuadratureConfig | None = None):
    """``<f, psi_{l,n,k}>`` as ``(-1)^l sqrt(C(m,l)) / 2^l * 2^(-n) * Delta^l T_n f(k)``.

    ``D^l B(.|[1 x (m-l), 1/2 x 2l]) = 2^l Delta^l B(.|[1 x (m-l), 1/2 x l])``
    moves the derivatives onto the discretization as differences. The
    ``2^(-n)`` combines the ``2^(n/2)`` normalizations of the framelet and of
    ``T_n``. Only even ``m`` is supported.
    """
    m, ell = fid.m, fid.ell
    if m % 2:
        raise UnsupportedCaseError("the difference identity is only available for even m")
    quad = quad or QuadratureConfig()
    tn = lambda x: discretize_Tn(f, m, ell, n, x, quad)  # noqa: E731
    d = difference_quarter(tn, ell, np.asarray(k, dtype=float))
    return (-1) ** ell * sqrt(comb(m, ell)) / 2.0**ell * 2.0 ** (-n) * d


# -- frame sums ---------------------------------------------------------------


def _framelet_support(fid: FrameletId):
    return tuple(float(t) for t in framelet_piecewise(fid).support)


def _frame_energy(f, m, box, quad, threads, coeff_fn, support_fn):
    tasks = [(ell, n) for ell in range(1, m + 1) for n in box.scales]

    def energy(task):
        ell, n = task
        ks = box.translates(n, support_fn(ell), f.support)
        if ks.size == 0:
            return 0.0
        c = coeff_fn(ell, n, ks)
        return float(np.dot(c, c))

    parts = ordered_map(energy, tasks, threads)
    return float(sum(parts))  # fixed task order


def parseval_ratio(f: TestFunction, m: int, box: IndexBox, quad: QuadratureConfig | None = None,
                   threads: int | None = None) -> float:
    """``sum_{(l,n,k) in box} |<f, psi_{l,n,k}>|^2 / ||f||^2``; at most 1 for a tight frame."""
    quad = quad or QuadratureConfig()
    return _frame_energy(
        f, m, box, quad, threads,
        lambda ell, n, ks: framelet_coefficients(f, FrameletId(m, ell), n, ks, quad),
        lambda ell: _framelet_support(FrameletId(m, ell)),
    ) / f.norm_squared(quad)


def parseval_ratio_gaussian(f: TestFunction, m: int, box: IndexBox, quad: QuadratureConfig | None = None,
                            threads: int | None = None) -> float:
    """The same energy ratio for the Gaussian system ``{G_l^(m)}``; lies in ``[A_m, B_m]``."""
    quad = quad or QuadratureConfig()

    def support(ell):
        gid = GaussianFrameletId(m, ell)
        r, c = _gaussian_extent(gid), (m % 2) / 2
        return (c - r, c + r)

    return _frame_energy(
        f, m, box, quad, threads,
        lambda ell, n, ks: gaussian_coefficients(f, GaussianFrameletId(m, ell), n, ks, quad),
        support,
    ) / f.norm_squared(quad)


def coefficient_table(f: TestFunction, m: int, box: IndexBox, quad: QuadratureConfig | None = None,
                      threads: int | None = None) -> list[dict]:
    """All coefficients in the box as ``{"l", "n", "k", "value"}`` records."""
    quad = quad or QuadratureConfig()
    tasks = [(ell, n) for ell in range(1, m + 1) for n in box.scales]

    def run(task):
        ell, n = task
        fid = FrameletId(m, ell)
        ks = box.translates(n, _framelet_support(fid), f.support)
        vals = framelet_coefficients(f, fid, n, ks, quad) if ks.size else np.zeros(0)
        return [{"l": ell, "n": n, "k": int(k), "value": float(v)} for k, v in zip(ks, vals)]

    return [rec for part in ordered_map(run, tasks, threads) for rec in part]


def reconstruct_partial(f: TestFunction, m: int, box: IndexBox, quad: QuadratureConfig | None, x,
                        threads: int | None = None):
    """``sum_{(l,n,k) in box} <f, psi_{l,n,k}> psi_{l,n,k}(x)``."""
    xs = np.asarray(x, dtype=float)
    out = np.zeros(xs.shape)
    for rec in coefficient_table(f, m, box, quad, threads):
        fid = FrameletId(m, rec["l"])
        s = 2.0 ** rec["n"]
        out = out + rec["value"] * sqrt(s) * framelet_piecewise(fid)(s * xs - rec["k"])
    return float(out) if out.ndim == 0 else out
