"""Closed-form Levinson constants and the zero-proportion objective.

The engine evaluates, in plain double precision, the three-parameter family
of constants that controls the lower bound for the proportion of simple
critical zeros over a primitive-character family:

    r^2 * c(theta, r, R) = C(theta, r, R) + e^{2R} * C*(theta, r, R)
    kappa' = 1 - log(c(theta, r, R)) / R

``theta`` is the mollifier-length exponent, ``r`` scales the derivative
weight in L + lambda*L', and ``R`` measures how far left of the critical
line the Littlewood contour sits.  ``big_c`` and ``big_c_star`` accept any
real (r, R != 0) so the substitution identity C*(t,r,R) = C(t,1-r,-R) is
testable; the logarithm in ``kappa_prime`` is what enforces R > 0 and c > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

__all__ = [
    "LevinsonParams",
    "ConstantReport",
    "OptimizationResult",
    "big_c",
    "big_c_star",
    "levinson_c",
    "levinson_c_r1",
    "levinson_c_half_r1",
    "kappa_prime",
    "constant_report",
    "optimize_kappa",
    "kappa_surface",
]


@dataclass(frozen=True)
class LevinsonParams:
    """The (theta, r, R) triple steering every closed form in this module."""

    theta: float
    r: float
    R: float

    def validated(self, *, need_positive_r: bool = False,
                  need_positive_R: bool = False) -> "LevinsonParams":
        if not (0.0 < self.theta <= 1.0):
            raise ParameterError(f"theta must lie in (0, 1], got {self.theta}")
        if self.R == 0.0:
            raise ParameterError("R must be nonzero")
        if need_positive_R and self.R <= 0.0:
            raise ParameterError(f"R must be positive, got {self.R}")
        if need_positive_r and self.r <= 0.0:
            raise ParameterError(f"r must be positive, got {self.r}")
        return self


@dataclass(frozen=True)
class ConstantReport:
    bigC: float
    bigCstar: float
    c: float
    kappaPrime: float


@dataclass(frozen=True)
class OptimizationResult:
    best: LevinsonParams
    kappaPrime: float
    evaluations: int
    boxLo: tuple[float, float]
    boxHi: tuple[float, float]
    refinementTolerance: float


def big_c(params: LevinsonParams) -> float:
    """C(theta, r, R), the un-mirrored half of the main-term constant."""
    p = params.validated()
    th, r, R = p.theta, p.r, p.R
    plus = 1.0 / (th * R) + th * R / 3.0
    minus = 1.0 / (th * R) - th * R / 3.0
    return -(r * r / 2.0 + 1.0 / (4.0 * R * R)) * plus + r * r / 2.0 \
        - (r / (2.0 * R)) * minus


def big_c_star(params: LevinsonParams) -> float:
    """C*(theta, r, R): ``big_c`` after the substitution r -> 1-r, R -> -R.

    Evaluated through the same expression so the identity holds bit-for-bit.
    """
    p = params.validated()
    return big_c(LevinsonParams(p.theta, 1.0 - p.r, -p.R))


def levinson_c(params: LevinsonParams) -> float:
    """c(theta, r, R) = (C + e^{2R} C*) / r^2."""
    p = params.validated(need_positive_R=True)
    if p.r == 0.0:
        raise ParameterError("r must be nonzero for c(theta, r, R)")
    return (big_c(p) + math.exp(2.0 * p.R) * big_c_star(p)) / (p.r * p.r)


def levinson_c_r1(theta: float, R: float) -> float:
    """The simplified r=1 closed form of c(theta, 1, R).

    Deliberately an independent code path from :func:`levinson_c`; the two
    agree to ~1e-15 relative and the test suite pins that.
    """
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    if R <= 0.0:
        raise ParameterError(f"R must be positive, got {R}")
    return (
        math.exp(2.0 * R) / (4.0 * R * R) * (1.0 / (theta * R) + theta * R / 3.0)
        - 1.0 / (4.0 * theta * R ** 3)
        - 1.0 / (2.0 * theta * R * R)
        - (1.0 / (2.0 * theta) + theta / 12.0) / R
        + (theta + 3.0) / 6.0
        - theta * R / 6.0
    )


def levinson_c_half_r1(R: float) -> float:
    """Levinson's original theta=1/2, r=1 constant, as displayed:

    c(1/2, 1, R) = e^{2R}/(4R^2) (2/R + R/6) - 1/(2R^3) - 1/R^2
                   - (25/24)/R + 7/12 - R/12
    """
    if R <= 0.0:
        raise ParameterError(f"R must be positive, got {R}")
    return (
        math.exp(2.0 * R) / (4.0 * R * R) * (2.0 / R + R / 6.0)
        - 1.0 / (2.0 * R ** 3)
        - 1.0 / (R * R)
        - 25.0 / (24.0 * R)
        + 7.0 / 12.0
        - R / 12.0
    )


def kappa_prime(params: LevinsonParams) -> float:
    """kappa' = 1 - log(c)/R, the proportion lower bound.

    Raises if c(theta, r, R) <= 0: the logarithm is undefined there and the
    parameters are outside the method's useful range.
    """
    p = params.validated(need_positive_R=True)
    c = levinson_c(p)
    if c <= 0.0:
        raise ParameterError(
            f"c(theta={p.theta}, r={p.r}, R={p.R}) = {c} is not positive; "
            "kappa' is undefined here")
    return 1.0 - math.log(c) / p.R


def constant_report(params: LevinsonParams) -> ConstantReport:
    p = params.validated(need_positive_R=True)
    return ConstantReport(
        bigC=big_c(p),
        bigCstar=big_c_star(p),
        c=levinson_c(p),
        kappaPrime=kappa_prime(p),
    )


def _kappa_or_neg_inf(theta: float, r: float, R: float) -> float:
    if r <= 0.0 or R <= 0.0:
        return float("-inf")
    c = levinson_c(LevinsonParams(theta, r, R))
    if c <= 0.0:
        return float("-inf")
    return 1.0 - math.log(c) / R


def optimize_kappa(
    theta: float,
    box_lo: tuple[float, float] = (0.5, 0.2),
    box_hi: tuple[float, float] = (2.0, 2.0),
    tol: float = 1e-8,
    grid: int = 64,
) -> OptimizationResult:
    """Maximize kappa'(theta, r, R) over the closed (r, R) box.

    Coarse ``grid`` x ``grid`` scan, then a deterministic Nelder-Mead polish
    clipped to the box.  Grid ties break toward smaller R, then smaller r.
    The returned kappaPrime is recomputed through :func:`kappa_prime` at the
    winning point, so it is bit-identical to a fresh evaluation.
    """
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    (r_lo, R_lo), (r_hi, R_hi) = box_lo, box_hi
    if not (0.0 < r_lo < r_hi and 0.0 < R_lo < R_hi):
        raise ParameterError("box must satisfy 0 < lo < hi in both r and R")
    if tol <= 0.0:
        raise ParameterError("tol must be positive")

    evaluations = 0

    def objective(r: float, R: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return _kappa_or_neg_inf(theta, r, R)

    best_val = float("-inf")
    best_rR = (r_lo, R_lo)
    import numpy as np

    rs = np.linspace(r_lo, r_hi, grid)
    Rs = np.linspace(R_lo, R_hi, grid)
    # Fixed scan order (R outer ascending, r inner ascending) with strict
    # improvement makes the tie-break "smaller R, then smaller r" automatic.
    for R in Rs:
        for r in rs:
            val = objective(float(r), float(R))
            if val > best_val:
                best_val = val
                best_rR = (float(r), float(R))

    if best_val == float("-inf"):
        raise ParameterError(
            f"kappa' is undefined (c <= 0) on the entire box for theta={theta}")

    from scipy.optimize import minimize

    def neg(x) -> float:
        return -objective(float(x[0]), float(x[1]))

    res = minimize(
        neg,
        x0=list(best_rR),
        method="Nelder-Mead",
        bounds=[(r_lo, r_hi), (R_lo, R_hi)],
        options={"xatol": tol, "fatol": tol * 1e-4, "maxiter": 2000},
    )
    cand = (float(res.x[0]), float(res.x[1]))
    if -res.fun > best_val:
        best_rR = cand

    best = LevinsonParams(theta, best_rR[0], best_rR[1])
    return OptimizationResult(
        best=best,
        kappaPrime=kappa_prime(best),
        evaluations=evaluations,
        boxLo=box_lo,
        boxHi=box_hi,
        refinementTolerance=tol,
    )


def kappa_surface(theta: float,
                  box_lo: tuple[float, float] = (0.5, 0.2),
                  box_hi: tuple[float, float] = (2.0, 2.0),
                  grid: int = 50) -> list[tuple[float, float, float]]:
    """(r, R, kappa') triples on a regular grid, sorted by (r, R).

    Points where c <= 0 carry kappa' = nan so the surface file stays
    rectangular.
    """
    if grid < 2:
        raise ParameterError("grid must be >= 2")
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    import numpy as np

    (r_lo, R_lo), (r_hi, R_hi) = box_lo, box_hi
    rows = []
    for r in np.linspace(r_lo, r_hi, grid):
        for R in np.linspace(R_lo, R_hi, grid):
            val = _kappa_or_neg_inf(theta, float(r), float(R))
            rows.append((float(r), float(R),
                         val if val != float("-inf") else float("nan")))
    return rows
