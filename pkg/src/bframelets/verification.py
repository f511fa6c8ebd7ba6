"""Invariant suites with machine-readable results (used by ``verify`` in the CLI)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .framelets import (
    FrameletId,
    calderon_sum,
    framelet_eval,
    framelet_eval_fourier_inversion,
    framelet_eval_recurrence,
    framelet_piecewise,
    uep_residual,
)
from .quadrature import QuadratureConfig

SUITES = ("uep", "symmetry", "moments", "calderon", "dualroute")


@dataclass
class SuiteResult:
    suite: str
    m: int
    passed: bool
    worst: float
    threshold: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def check_uep(m: int, grid: int = 4096, threshold: float = 1e-12) -> SuiteResult:
    w = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    r1, r2 = uep_residual(m, w)
    worst = float(max(np.max(r1), np.max(r2)))
    return SuiteResult("uep", m, worst < threshold, worst, threshold,
                       {"partition": float(np.max(r1)), "cross": float(np.max(r2)), "grid": grid})


def check_symmetry(m: int) -> SuiteResult:
    """Coefficient-level ``psi(-x) = (-1)^l psi(x)`` for the centered framelets."""
    bad = []
    for ell in range(1, m + 1):
        p = framelet_piecewise(FrameletId(m, ell, True))
        target = p if ell % 2 == 0 else -p
        if not p.reflect().exact_equals(target):
            bad.append(ell)
    return SuiteResult("symmetry", m, not bad, float(len(bad)), 0.0, {"exact": True, "failing_l": bad})


def check_moments(m: int, threshold: float = 1e-9) -> SuiteResult:
    """``int x^j psi_l^(m)(x) dx`` for ``j < l`` by exact integration."""
    worst, nonzero = 0.0, 0
    for ell in range(1, m + 1):
        p = framelet_piecewise(FrameletId(m, ell))
        for j in range(ell):
            q = p.moment_exact(j)
            nonzero += q != 0
            worst = max(worst, abs(float(q) * float(p.scale)))
    return SuiteResult("moments", m, worst < threshold, worst, threshold, {"exact_nonzero": int(nonzero)})


def check_calderon(m: int, n_max: int = 30, grid: int = 1025, threshold: float = 1e-6) -> SuiteResult:
    w = np.linspace(1.0, 2.0, grid)
    worst = float(np.max(np.abs(calderon_sum(m, w, n_max) - 1.0)))
    return SuiteResult("calderon", m, worst < threshold, worst, threshold, {"n_max": n_max, "grid": grid})


def dualroute_grid(m: int, step: float = 1 / 64) -> np.ndarray:
    half = m / 2 + 1
    n = int(round(2 * half / step))
    return -half + step * np.arange(n + 1)


def check_dualroute(m: int, quad: QuadratureConfig | None = None, rec_tol: float = 1e-10,
                    fourier_tol: float = 1e-6) -> SuiteResult:
    """Box-derivative vs recurrence (all ``m``) and vs Fourier inversion (``m >= 2``)."""
    quad = quad or QuadratureConfig()
    x = dualroute_grid(m)
    rec, fou = 0.0, 0.0
    for ell in range(1, m + 1):
        fid = FrameletId(m, ell)
        a = framelet_eval(fid, x)
        rec = max(rec, float(np.max(np.abs(a - framelet_eval_recurrence(fid, x)))))
        if m >= 2:
            fou = max(fou, float(np.max(np.abs(a - framelet_eval_fourier_inversion(fid, x, quad)))))
    ok = rec < rec_tol and (m < 2 or fou < fourier_tol)
    return SuiteResult("dualroute", m, ok, max(rec, fou), fourier_tol,
                       {"recurrence": rec, "fourier": fou if m >= 2 else None,
                        "recurrence_threshold": rec_tol, "quadrature": quad.to_dict()})


def run_suite(suite: str, m: int) -> SuiteResult:
    fn = {
        "uep": check_uep,
        "symmetry": check_symmetry,
        "moments": check_moments,
        "calderon": check_calderon,
        "dualroute": check_dualroute,
    }[suite]
    return fn(m)
