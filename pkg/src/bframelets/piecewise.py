"""Exact compactly supported piecewise polynomials on uniform rational grids.

Every spline in this package (B-splines, univariate box splines, framelets)
has knots on a uniform grid ``t_i = origin + i * step``. Each piece is stored
in the normalized local variable ``u = (x - t_i) / step`` in ``[0, 1)``, so
shifting by any rational amount only moves ``origin`` and shifting by a
multiple of ``step`` only re-indexes pieces. That keeps the convolution and
recurrence constructions exact and cheap (no Taylor re-expansion).

Coefficients are exact rationals. An irrational overall factor (such as
``sqrt(binom(m, l)) / 4**l``) lives in ``scale`` as a :class:`SqrtRational`.
"""

from __future__ import annotations

import json
from functools import cached_property
from math import comb, gcd

import numpy as np

from ._rational import ONE, Q, SqrtRational, q_str, to_q
from .errors import InvalidInputError, SmoothnessError


def _taylor_shift(coeffs, s):
    """Coefficients of ``p(u + s)`` given those of ``p(u)``."""
    c = list(coeffs)
    n = len(c)
    if s == 0:
        return c
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += s * c[j + 1]
    return c


def _compose_affine(coeffs, a, b):
    """Coefficients of ``p(a*u + b)``."""
    c = _taylor_shift(coeffs, b)
    out = []
    p = Q(1)
    for cj in c:
        out.append(cj * p)
        p *= a
    return out


def _strip(coeffs):
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def rational_gcd(a, b) -> Q:
    a, b = Q(a), Q(b)
    den = a.denominator * b.denominator // gcd(int(a.denominator), int(b.denominator))
    num = gcd(int(a * den), int(b * den))
    return Q(num, den)


class PiecewisePolynomial:
    """Compactly supported piecewise polynomial with exact rational pieces.

    Parameters
    ----------
    origin, step : rational
        Breakpoints are ``origin + i * step`` for ``i = 0..len(pieces)``.
    pieces : sequence of coefficient sequences
        Piece ``i`` is ``sum_j c[i][j] * u**j`` with ``u = (x - t_i) / step``.
    scale : SqrtRational or number
        Multiplier applied to every piece at evaluation time.
    smoothness : int
        Smoothness order ``s``: adjacent pieces agree in value and the first
        ``s - 1`` derivatives. ``0`` means possibly discontinuous.

    Evaluation uses half-open pieces ``[t_i, t_{i+1})`` except at the last
    breakpoint, where the left limit is taken. The value is 0 outside
    ``[t_0, t_last]``.
    """

    def __init__(self, origin, step, pieces, scale=ONE, smoothness=0):
        self.origin = to_q(origin)
        self.step = to_q(step)
        if self.step <= 0:
            raise InvalidInputError("step must be positive")
        rows = [_strip(to_q(c) for c in row) for row in pieces]
        if not rows:
            raise InvalidInputError("at least one piece is required")
        width = max(len(r) for r in rows)
        self.pieces = tuple(tuple(r + [Q(0)] * (width - len(r))) for r in rows)
        self.scale = scale if isinstance(scale, SqrtRational) else SqrtRational.of(scale)
        self.smoothness = int(smoothness)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def box(cls, width) -> PiecewisePolynomial:
        """Normalized centered box ``1/a * 1_[-a/2, a/2)``."""
        a = to_q(width)
        if a <= 0:
            raise InvalidInputError("box width must be positive")
        return cls(-a / 2, a, [[1 / a]], smoothness=0)

    @classmethod
    def from_breakpoints(cls, breakpoints, pieces, scale=1.0, smoothness=0):
        """Build from breakpoints and pieces in powers of ``(x - t_i)``.

        Breakpoints must be uniformly spaced.
        """
        bp = [to_q(t) for t in breakpoints]
        if len(bp) != len(pieces) + 1:
            raise InvalidInputError("need len(pieces) + 1 breakpoints")
        steps = {bp[i + 1] - bp[i] for i in range(len(bp) - 1)}
        if len(steps) != 1:
            raise InvalidInputError("breakpoints must be uniformly spaced")
        h = steps.pop()
        rows = [[to_q(c) * h**j for j, c in enumerate(row)] for row in pieces]
        return cls(bp[0], h, rows, scale, smoothness)

    @classmethod
    def _trusted(cls, origin, step, rows, scale, smoothness):
        # internal constructor: rows already exact, rectangular and nonempty
        obj = cls.__new__(cls)
        obj.origin = origin
        obj.step = step
        obj.pieces = tuple(rows)
        obj.scale = scale
        obj.smoothness = smoothness
        return obj

    def _like(self, origin, pieces, *, scale=None, smoothness=None, step=None):
        rows = [tuple(r) for r in pieces]
        width = max(len(r) for r in rows)
        if any(len(r) != width for r in rows):
            rows = [r + (Q(0),) * (width - len(r)) for r in rows]
        return PiecewisePolynomial._trusted(
            origin,
            self.step if step is None else step,
            rows,
            self.scale if scale is None else scale,
            self.smoothness if smoothness is None else smoothness,
        )

    # -- basic properties -----------------------------------------------------

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    @property
    def degree(self) -> int:
        return len(self.pieces[0]) - 1

    @property
    def breakpoints(self) -> tuple:
        return tuple(self.origin + i * self.step for i in range(self.n_pieces + 1))

    @property
    def support(self) -> tuple:
        return self.origin, self.origin + self.n_pieces * self.step

    def __repr__(self):
        lo, hi = self.support
        return (
            f"PiecewisePolynomial(support=[{q_str(lo)}, {q_str(hi)}], step={q_str(self.step)}, "
            f"pieces={self.n_pieces}, degree={self.degree}, scale={self.scale!r}, "
            f"smoothness={self.smoothness})"
        )

    # -- evaluation -----------------------------------------------------------

    @cached_property
    def _float_coeffs(self):
        return np.array([[float(c) for c in row] for row in self.pieces], dtype=float)

    @cached_property
    def _float_breakpoints(self):
        return np.array([float(t) for t in self.breakpoints])

    def __call__(self, x):
        """Evaluate (times ``scale``) at float or array ``x``."""
        xa = np.asarray(x, dtype=float)
        bp = self._float_breakpoints
        idx = np.searchsorted(bp, xa, side="right") - 1
        inside = (xa >= bp[0]) & (xa <= bp[-1])
        idx = np.clip(idx, 0, self.n_pieces - 1)
        u = (xa - bp[idx]) / float(self.step)
        coeffs = self._float_coeffs
        out = coeffs[idx, -1]
        for j in range(self.degree - 1, -1, -1):
            out = out * u + coeffs[idx, j]
        out = np.where(inside, out * float(self.scale), 0.0)
        return float(out) if out.ndim == 0 else out

    def exact_value(self, x) -> Q:
        """Exact value at rational ``x`` without the ``scale`` factor."""
        xq = to_q(x)
        lo, hi = self.support
        if xq < lo or xq > hi:
            return Q(0)
        i = min(int((xq - lo) // self.step), self.n_pieces - 1)
        u = (xq - lo) / self.step - i
        acc = Q(0)
        for c in reversed(self.pieces[i]):
            acc = acc * u + c
        return acc

    # -- algebra --------------------------------------------------------------

    def shift(self, c) -> PiecewisePolynomial:
        """``x -> p(x - c)``."""
        return self._like(self.origin + to_q(c), self.pieces)

    def __mul__(self, factor) -> PiecewisePolynomial:
        f = to_q(factor)
        return self._like(self.origin, [[f * c for c in row] for row in self.pieces])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def with_scale(self, scale) -> PiecewisePolynomial:
        return self._like(self.origin, self.pieces, scale=scale)

    def times_scale(self, factor) -> PiecewisePolynomial:
        return self.with_scale(self.scale * factor)

    def mul_affine(self, slope, intercept) -> PiecewisePolynomial:
        """Multiply by the affine function ``slope * x + intercept``."""
        a, b = to_q(slope), to_q(intercept)
        h = self.step
        rows = []
        for i, row in enumerate(self.pieces):
            c0 = a * (self.origin + i * h) + b
            c1 = a * h
            new = [c0 * c for c in row] + [Q(0)]
            for j, c in enumerate(row):
                new[j + 1] += c1 * c
            rows.append(new)
        return self._like(self.origin, rows)

    def _aligned_offset(self, other) -> int:
        if other.step != self.step:
            raise InvalidInputError("piecewise polynomials live on different grids")
        off = (other.origin - self.origin) / self.step
        if off.denominator != 1:
            raise InvalidInputError("piecewise polynomial grids are not aligned")
        return int(off)

    def __add__(self, other) -> PiecewisePolynomial:
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        ratio = other.scale.ratio(self.scale) if self.scale.square else None
        if ratio is None:
            raise InvalidInputError("scales differ by an irrational factor")
        off = self._aligned_offset(other)
        start = min(0, off)
        stop = max(self.n_pieces, off + other.n_pieces)
        width = max(self.degree, other.degree) + 1
        rows = [[Q(0)] * width for _ in range(stop - start)]
        for i, row in enumerate(self.pieces):
            for j, c in enumerate(row):
                rows[i - start][j] += c
        for i, row in enumerate(other.pieces):
            for j, c in enumerate(row):
                rows[i + off - start][j] += ratio * c
        smooth = min(self.smoothness, other.smoothness)
        return self._like(self.origin + start * self.step, rows, smoothness=smooth)

    def __sub__(self, other):
        return self + (-other)

    def refine(self, factor: int) -> PiecewisePolynomial:
        """Split every piece into ``factor`` equal sub-pieces."""
        r = int(factor)
        if r == 1:
            return self
        rows = []
        for row in self.pieces:
            for j in range(r):
                rows.append(_compose_affine(row, Q(1, r), Q(j, r)))
        return self._like(self.origin, rows, step=self.step / r)

    def coarsen(self) -> PiecewisePolynomial:
        """Merge sub-pieces wherever the grid can be coarsened without loss."""
        n = self.n_pieces
        for r in range(n, 1, -1):
            if n % r:
                continue
            ok = True
            for g in range(0, n, r):
                base = self.pieces[g]
                for j in range(1, r):
                    if tuple(_compose_affine(base, Q(1), Q(j))) != self.pieces[g + j]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                rows = [_compose_affine(self.pieces[g], Q(r), Q(0)) for g in range(0, n, r)]
                return self._like(self.origin, rows, step=self.step * r)
        return self

    def trim(self) -> PiecewisePolynomial:
        """Drop identically zero pieces at both ends."""
        rows = list(self.pieces)
        lead = 0
        while lead < len(rows) - 1 and not any(rows[lead]):
            lead += 1
        rows = rows[lead:]
        while len(rows) > 1 and not any(rows[-1]):
            rows.pop()
        return self._like(self.origin + lead * self.step, rows)

    def reflect(self) -> PiecewisePolynomial:
        """``x -> p(-x)`` (pieces reversed; half-open convention not mirrored)."""
        rows = [_compose_affine(row, Q(-1), Q(1)) for row in reversed(self.pieces)]
        lo, hi = self.support
        return self._like(-hi, rows)

    # -- calculus -------------------------------------------------------------

    def derivative(self, order: int = 1) -> PiecewisePolynomial:
        """Exact ``order``-th derivative, breakpoints preserved.

        Raises :class:`SmoothnessError` when ``order`` exceeds the smoothness
        order (the result would contain Dirac masses).
        """
        if order < 0:
            raise InvalidInputError("derivative order must be nonnegative")
        if order > self.smoothness:
            raise SmoothnessError(
                f"cannot differentiate {order} times a spline of smoothness order {self.smoothness}"
            )
        p = self
        for _ in range(order):
            h = p.step
            rows = [[j * row[j] / h for j in range(1, len(row))] or [Q(0)] for row in p.pieces]
            p = p._like(p.origin, rows, smoothness=p.smoothness - 1)
        return p

    def _antiderivative_rows(self):
        h = self.step
        rows, const = [], Q(0)
        for row in self.pieces:
            new = [const] + [h * c / (j + 1) for j, c in enumerate(row)]
            rows.append(new)
            const = sum(new, Q(0))
        return rows, const

    def convolve_box(self, width) -> PiecewisePolynomial:
        """Convolve with the normalized centered box of the given width.

        Uses ``(P(x + a/2) - P(x - a/2)) / a`` with ``P`` the exact
        antiderivative.
        """
        a = to_q(width)
        if a <= 0:
            raise InvalidInputError("box width must be positive")
        p = self
        g = rational_gcd(p.step, a)
        if g != p.step:
            p = p.refine(int(p.step / g))
        s = int(a / p.step)
        prim, total = p._antiderivative_rows()
        n = p.n_pieces
        width_ = len(prim[0])
        const = [total] + [Q(0)] * (width_ - 1)
        zero = [Q(0)] * width_
        rows = []
        for i in range(n + s):
            left = prim[i] if i < n else const
            j = i - s
            right = zero if j < 0 else (prim[j] if j < n else const)
            rows.append([(lc - rc) / a for lc, rc in zip(left, right)])
        return p._like(p.origin - a / 2, rows, smoothness=p.smoothness + 1)

    def integral_exact(self) -> Q:
        """``int p`` without the ``scale`` factor."""
        h = self.step
        return sum((h * c / (j + 1) for row in self.pieces for j, c in enumerate(row)), Q(0))

    def integral(self) -> float:
        return float(self.integral_exact()) * float(self.scale)

    def moment_exact(self, power: int) -> Q:
        """``int x**power p(x) dx`` without the ``scale`` factor."""
        h = self.step
        total = Q(0)
        for i, row in enumerate(self.pieces):
            t = self.origin + i * h
            for r in range(power + 1):
                w = comb(power, r) * t ** (power - r) * h**r
                if w == 0:
                    continue
                total += h * w * sum((c / (r + s + 1) for s, c in enumerate(row)), Q(0))
        return total

    def inner_exact(self, other: PiecewisePolynomial) -> Q:
        """``int p * q`` without scale factors (grids must be aligned)."""
        off = self._aligned_offset(other)
        h = self.step
        total = Q(0)
        for i, row in enumerate(self.pieces):
            k = i - off
            if not 0 <= k < other.n_pieces:
                continue
            orow = other.pieces[k]
            for a_, ca in enumerate(row):
                if ca == 0:
                    continue
                for b_, cb in enumerate(orow):
                    total += ca * cb / (a_ + b_ + 1)
        return h * total

    def norm_squared(self) -> float:
        return float(self.inner_exact(self)) * float(self.scale) ** 2

    # -- comparison & serialization -------------------------------------------

    def exact_equals(self, other: PiecewisePolynomial) -> bool:
        """Equality as functions, including scale, decided in exact arithmetic."""
        a, b = self.trim(), other.trim()
        if a.step != b.step:
            g = rational_gcd(a.step, b.step)
            a, b = a.refine(int(a.step / g)), b.refine(int(b.step / g))
        a_zero = not any(any(r) for r in a.pieces) or a.scale.square == 0
        b_zero = not any(any(r) for r in b.pieces) or b.scale.square == 0
        if a_zero or b_zero:
            return a_zero and b_zero
        ratio = b.scale.ratio(a.scale)
        if ratio is None or a.origin != b.origin or a.n_pieces != b.n_pieces:
            return False
        width = max(a.degree, b.degree) + 1
        for ra, rb in zip(a.pieces, b.pieces):
            ra = list(ra) + [Q(0)] * (width - len(ra))
            rb = list(rb) + [Q(0)] * (width - len(rb))
            if any(x != ratio * y for x, y in zip(ra, rb)):
                return False
        return True

    def to_dict(self) -> dict:
        """JSON-ready dict ``{breakpoints, pieces, scale}``.

        Pieces are given in powers of ``(x - t_i)``; rationals are written as
        ``"p/q"`` strings so the round trip is exact. ``scale_exact`` carries
        the scale as ``sign * sqrt(square)``.
        """
        h = self.step
        return {
            "breakpoints": [q_str(t) for t in self.breakpoints],
            "pieces": [[q_str(c / h**j) for j, c in enumerate(row)] for row in self.pieces],
            "scale": float(self.scale),
            "scale_exact": {"sign": self.scale.sign, "square": q_str(self.scale.square)},
            "smoothness": self.smoothness,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> PiecewisePolynomial:
        if "scale_exact" in data:
            ex = data["scale_exact"]
            scale = SqrtRational(to_q(ex["square"]), int(ex["sign"]))
        else:
            scale = SqrtRational.of(float(data.get("scale", 1.0)))
        return cls.from_breakpoints(
            data["breakpoints"], data["pieces"], scale, data.get("smoothness", 0)
        )

    @classmethod
    def from_json(cls, text: str) -> PiecewisePolynomial:
        return cls.from_dict(json.loads(text))
