"""Mollified second moments of G = L + lambda L' and their family averages.

The central object is

    I_chi = integral |G(sigma + it, chi) M(1/2 + it, chi)|^2 Phi(t) dt,

compared against the main-term prediction c(theta, r, R) * Phihat(1).

Finite-height normalization: the paper's parameters are fractions of
log(q/pi) in the q -> infinity regime with T only polylog(q).  At desk
scale that regime is unreachable (T is the larger of the two), so sigma,
lambda and the mollifier length are tied to the analytic-conductor size
N = (q/pi) T instead - the same normalization the zero-count pipeline uses.
Every report carries this substitution in its ``regime`` header.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import LevinsonParams, levinson_c
from .dirichlet.characters import (DirichletCharacter, enumerate_characters,
                                   euler_phi, primitive_count)
from .dirichlet.lfunctions import (_hurwitz_reduced, l_and_deriv_values,
                                   q_tilde)
from .errors import ConvergenceError, CostGuardError, ParameterError
from .mollifier import MollifierCoefficients, coefficients, mollifier_values

__all__ = [
    "SmoothingPhi",
    "WeightPsi",
    "DeskParams",
    "MomentReport",
    "desk_params",
    "g_value",
    "i_chi",
    "family_average",
]

_REGIME_NOTE = ("desk-scale run: sigma, lambda, X are tied to the analytic "
                "conductor N = (q/pi) T; the asymptotic regime "
                "(log Q)^6 <= T <= (log Q)^A is out of numerical reach and "
                "only trends are meaningful")


@dataclass(frozen=True)
class SmoothingPhi:
    """Smooth nonnegative weight that localizes the t-integration at scale T.

    ``gaussian``: exp(-(t/T)^2), truncated at |t| <= cutoff*T.
    ``bump``: exp(-1/(1-(t/(cutoff*T))^2)) on |t| < cutoff*T, compactly
    supported and C-infinity.
    """

    T: float
    kind: str = "gaussian"
    cutoff: float = 8.0

    def __post_init__(self):
        if self.T <= 0:
            raise ParameterError("Phi scale T must be positive")
        if self.kind not in ("gaussian", "bump"):
            raise ParameterError(f"unknown Phi shape {self.kind!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        A = self.cutoff * self.T
        if self.kind == "gaussian":
            out = np.exp(-((t / self.T) ** 2))
            return np.where(np.abs(t) <= A, out, 0.0)
        u = t / A
        inside = np.abs(u) < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(inside, np.exp(-1.0 / np.maximum(1.0 - u * u, 1e-300)), 0.0)
        return out

    @property
    def phihat1(self) -> float:
        """Phihat(1) = integral of Phi over the real line."""
        if self.kind == "gaussian":
            # truncation error below 1e-27 relative for cutoff >= 8
            return self.T * math.sqrt(math.pi)
        A = self.cutoff * self.T
        from scipy.integrate import quad
        val, _ = quad(lambda u: math.exp(-1.0 / (1.0 - u * u)), -1.0, 1.0,
                      limit=200)
        return A * val

    @property
    def support(self) -> tuple[float, float]:
        A = self.cutoff * self.T
        return (-A, A)


@dataclass(frozen=True)
class WeightPsi:
    """C-infinity bump supported on [1, 2] weighting the conductor family."""

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        v = 2.0 * u - 3.0
        inside = np.abs(v) < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(inside,
                            np.exp(-1.0 / np.maximum(1.0 - v * v, 1e-300)),
                            0.0)


@dataclass(frozen=True)
class DeskParams:
    """sigma, lambda, X derived from the analytic-conductor size N = q~ T."""

    q: int
    T: float
    theta: float
    r: float
    R: float
    logN: float
    sigma: float
    lam: float
    X: float


def desk_params(q: int, T: float, theta: float, r: float, R: float) -> DeskParams:
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    if r <= 0 or R <= 0:
        raise ParameterError("r and R must be positive")
    logN = math.log(q_tilde(q) * T)
    if logN <= 0:
        raise ParameterError(f"analytic conductor too small for q={q}, T={T}")
    return DeskParams(q=q, T=float(T), theta=theta, r=r, R=R, logN=logN,
                      sigma=0.5 - R / logN, lam=1.0 / (r * logN),
                      X=math.exp(theta * logN))


def g_value(chi: DirichletCharacter, s: complex, lam: float) -> complex:
    """G(s, chi) = L(s, chi) + lambda L'(s, chi)."""
    s_arr = np.array([complex(s)])
    L, dL = l_and_deriv_values(chi, s_arr)
    return complex(L[0] + lam * dL[0])


def _trapezoid_refine(gfun, a: float, b: float, h0: float, tol: float,
                      max_doublings: int = 14):
    """Trapezoid with interval halving and one Richardson extrapolation.

    ``gfun(t_array) -> (k, nt)`` may evaluate several integrands at once;
    convergence (|T_{h/2} - T_h|/3 < tol) is required for every row, and the
    Simpson-extrapolated value (4 T_{h/2} - T_h)/3 is returned.
    """
    n = max(8, int(math.ceil((b - a) / h0)))
    t = np.linspace(a, b, n + 1)
    vals = np.atleast_2d(gfun(t))
    h = (b - a) / n
    I = h * (vals[:, 0] / 2 + vals[:, 1:-1].sum(axis=1) + vals[:, -1] / 2)
    for _ in range(max_doublings):
        mid = (t[:-1] + t[1:]) / 2.0
        vmid = np.atleast_2d(gfun(mid))
        I_new = I / 2.0 + (h / 2.0) * vmid.sum(axis=1)
        if bool(np.all(np.abs(I_new - I) / 3.0 < tol)):
            return (4.0 * I_new - I) / 3.0
        t_full = np.empty(t.size + mid.size)
        t_full[0::2] = t
        t_full[1::2] = mid
        t = t_full
        I, h = I_new, h / 2.0
    raise ConvergenceError(
        f"quadrature did not reach tolerance {tol:.2g} after "
        f"{max_doublings} refinements on [{a}, {b}]")


def _adaptive_panels(gfun, a: float, b: float, h0: float, tol: float,
                     panel_width: float, max_doublings: int = 14):
    """Panel-wise trapezoid refinement: tail panels (Gaussian decay) settle
    at the base grid instead of inheriting the core's refinement level."""
    n_panels = max(1, int(math.ceil((b - a) / panel_width)))
    edges = np.linspace(a, b, n_panels + 1)
    total = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        part = _trapezoid_refine(gfun, float(lo), float(hi), h0,
                                 tol / n_panels, max_doublings)
        total = part if total is None else total + part
    return total


def i_chi(chi: DirichletCharacter, sigma: float, lam: float,
          coeffs: MollifierCoefficients | None, phi: SmoothingPhi,
          tol_rel: float = 1e-6) -> float:
    """The smoothed mollified second moment for a single character.

    ``coeffs=None`` means M = 1 (no mollifier).  Absolute quadrature target
    is ``tol_rel * Phihat(1)``.
    """
    if not chi.is_primitive:
        raise ParameterError("the moment is defined for primitive characters")
    lo, hi = phi.support

    def gfun(t):
        s = sigma + 1j * t
        L, dL = l_and_deriv_values(chi, s)
        G = L + lam * dL
        if coeffs is None:
            M = np.ones_like(G)
        else:
            M = mollifier_values(coeffs, chi, 0.5 + 1j * t)
        return (np.abs(G * M) ** 2 * phi(t))[None, :]

    h0 = 2.0 * math.pi / (8.0 * math.log(q_tilde(chi.q) * max(phi.T, 3.0) + 3.0))
    out = _adaptive_panels(gfun, lo, hi, h0, tol_rel * phi.phihat1,
                           panel_width=phi.T)
    return float(out[0])


def _family_integrand_factory(q: int, prim: list[DirichletCharacter],
                              sigma: float, lam: float,
                              coeffs: MollifierCoefficients):
    """Batched |G M|^2 for all primitive characters mod q on a t-grid.

    The Hurwitz table is shared across the characters of the modulus, which
    is what makes conductor-family averaging affordable.
    """
    coprime = np.array([a for a in range(1, q + 1) if math.gcd(a, q) == 1])
    tbl = np.stack([np.array([c.values[a % q] for a in coprime]) for c in prim])
    n = coeffs.length
    m = np.arange(1, n + 1)
    mw = coeffs.coeffs[1:] * np.sqrt(m)          # mu(m) P(1 - log m/log X)
    keep = mw != 0
    m_keep = m[keep]
    mw_keep = mw[keep]
    chim = np.stack([np.array([c.values[mm % q] for mm in m_keep]) for c in prim])
    lq = math.log(q)

    def gfun(t):
        s = sigma + 1j * np.asarray(t, dtype=float)
        zv = np.empty((len(coprime), s.size), dtype=complex)
        zd = np.empty_like(zv)
        for i, a in enumerate(coprime):
            v, dv = _hurwitz_reduced(s, a / q, 1e-10 / q, True)
            zv[i] = v
            zd[i] = dv
        tot = tbl @ zv
        dtot = tbl @ zd
        qs = np.exp(-s * lq)
        L = qs * tot
        dL = qs * (dtot - lq * tot)
        G = L + lam * dL
        E = np.exp(np.multiply.outer(-(0.5 + 1j * np.asarray(t)), np.log(m_keep)))
        M = (chim * mw_keep) @ E.T
        return np.abs(G * M) ** 2

    return gfun


@dataclass(frozen=True)
class MomentReport:
    Q: float
    T: float
    theta: float
    r: float
    R: float
    lhs: float
    rhs: float
    perCharacter: tuple[tuple[int, int, float], ...]   # (q, chi index, I_chi)
    regime: str = _REGIME_NOTE
    rhsNormalization: str = "phi_star(q)/phi(q)"

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


def family_average(Q: float, T: float, theta: float, r: float, R: float,
                   psi: WeightPsi | None = None,
                   phi: SmoothingPhi | None = None,
                   tol_rel: float = 1e-4,
                   max_quad_points: int = 500_000_000,
                   workers: int = 1) -> MomentReport:
    """Average of I_chi over primitive characters with conductor weight
    Psi(q/Q), against the Theorem-2 style right-hand side.

    LHS = sum_q Psi(q/Q)/phi(q) sum*_chi I_chi
    RHS = c(theta, r, R) Phihat(1) sum_q Psi(q/Q) phi*(q)/phi(q)
    """
    if Q < 2:
        raise ParameterError("Q must be >= 2")
    psi = psi if psi is not None else WeightPsi()
    phi = phi if phi is not None else SmoothingPhi(T=T)
    c_pred = levinson_c(LevinsonParams(theta=theta, r=r, R=R))
    phihat = phi.phihat1

    qs = [q for q in range(int(math.floor(Q)) + 1, int(math.ceil(2 * Q)))
          if float(psi(q / Q)) > 0.0 and primitive_count(q) > 0]
    if not qs:
        raise ParameterError(
            f"Psi(q/{Q}) vanishes on every modulus with primitive characters")

    # quadrature cost guard: points per modulus * moduli * characters
    lo_all, hi_all = phi.support
    est = 0
    for q in qs:
        h0 = 2.0 * math.pi / (8.0 * math.log(q_tilde(q) * max(T, 3.0) + 3.0))
        est += int((hi_all - lo_all) / h0) * euler_phi(q)
    if est > max_quad_points:
        raise CostGuardError(
            f"family quadrature would need ~{est:.2e} integrand values "
            f"(guard {max_quad_points:.2e}); shrink Q, T or the cutoff")

    A = phi.support[1]

    def one_modulus(q: int) -> tuple[list[tuple[int, int, float]], float]:
        pars = desk_params(q, T, theta, r, R)
        prim = [c for c in enumerate_characters(q) if c.is_primitive]
        conj_of = {c.index: c.conjugate().index for c in prim}
        pos = {c.index: i for i, c in enumerate(prim)}
        co = coefficients(max(pars.X, 2.0))
        gfun = _family_integrand_factory(q, prim, pars.sigma, pars.lam, co)

        # t -> -t swaps chi with its conjugate in |G M|^2, and Phi is even,
        # so I_chi = int_0^A (f_chi + f_chibar) Phi.
        def half(t):
            return gfun(t) * phi(t)[None, :]

        h0 = 2.0 * math.pi / (8.0 * math.log(q_tilde(q) * max(T, 3.0) + 3.0))
        half_ints = _adaptive_panels(half, 0.0, A, h0, tol_rel * phihat,
                                     panel_width=phi.T)
        rows = []
        q_sum = 0.0
        for c in prim:
            I = float(half_ints[pos[c.index]] + half_ints[pos[conj_of[c.index]]])
            rows.append((q, c.index, I))
            q_sum += I
        return rows, q_sum

    results: dict[int, tuple[list[tuple[int, int, float]], float]] = {}
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for q, res in zip(qs, ex.map(one_modulus, qs)):
                results[q] = res
    else:
        for q in qs:
            results[q] = one_modulus(q)

    lhs = 0.0
    rhs = 0.0
    per_char: list[tuple[int, int, float]] = []
    for q in qs:                      # fixed order: reduction is deterministic
        rows, q_sum = results[q]
        w = float(psi(q / Q))
        per_char.extend(rows)
        lhs += w / euler_phi(q) * q_sum
        rhs += w * primitive_count(q) / euler_phi(q)
    rhs *= c_pred * phihat
    if rhs == 0.0:
        raise ParameterError("empty family: rhs vanished")
    return MomentReport(Q=float(Q), T=float(T), theta=theta, r=r, R=R,
                        lhs=lhs, rhs=rhs, perCharacter=tuple(per_char))


def single_modulus_report(q: int, T: float, theta: float, r: float, R: float,
                          phi: SmoothingPhi | None = None,
                          tol_rel: float = 1e-5) -> MomentReport:
    """Unweighted single-modulus version: (1/phi*(q)) sum* I_chi vs c Phihat."""
    nstar = primitive_count(q)
    if nstar == 0:
        raise ParameterError(f"no primitive characters mod {q}")
    phi = phi if phi is not None else SmoothingPhi(T=T)
    pars = desk_params(q, T, theta, r, R)
    co = coefficients(max(pars.X, 2.0))
    per_char = []
    total = 0.0
    for c in enumerate_characters(q):
        if not c.is_primitive:
            continue
        I = i_chi(c, pars.sigma, pars.lam, co, phi, tol_rel=tol_rel)
        per_char.append((q, c.index, I))
        total += I
    c_pred = levinson_c(LevinsonParams(theta=theta, r=r, R=R))
    return MomentReport(Q=float(q), T=float(T), theta=theta, r=r, R=R,
                        lhs=total / nstar, rhs=c_pred * phi.phihat1,
                        perCharacter=tuple(per_char))
