"""Mollifier coefficients, bilinear mollifier sums, and their asymptotics.

The mollifier is the Mobius-weighted Dirichlet polynomial

    M(s, chi) = sum_{m <= X} mu(m) chi(m) m^{-s} P(1 - log m / log X),

stored through c(h) = mu(h) h^{-1/2} P(1 - log h / log X).  Everything the
main-term constant c(theta, r, R) is built from reduces to sums

    S = sum_{h,k <= X} c(h) c(k) w(h1) w'(k1),        h1 = h/(h,k), k1 = k/(h,k)

with separable weights on the reduced pair.  Grouping by g = (h,k) and
resolving the coprimality of (h1, k1) by Mobius inversion turns the O(X^2)
double sum into an exact O(X log^2 X) computation:

    S = sum_g sum_d mu(d) [sum_m c(g d m) w(d m)] [sum_m c(g d m) w'(d m)],

which is what ``_bilinear_many`` evaluates (compensated accumulation in a
fixed (g, d) order, so results are bit-reproducible).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import LevinsonParams, levinson_c
from .errors import CostGuardError, ParameterError

__all__ = [
    "MollifierShape",
    "MollifierCoefficients",
    "SumComparison",
    "VSums",
    "DiagonalComparison",
    "mu_sieve",
    "coefficients",
    "mollifier_value",
    "mollifier_values",
    "direct_bilinear",
    "asymptotic_bilinear",
    "v_sums",
    "v_closed_form",
    "diagonal_main_term",
]

_X_GUARD = 100_000


@dataclass(frozen=True)
class MollifierShape:
    """P in the coefficient smoothing; P(0) = 0 and P(1) = 1."""

    kind: str = "linear"            # "linear" or "sinh"
    a: float = 1.3408               # only used by the sinh shape

    def __call__(self, x):
        if self.kind == "linear":
            return x
        if self.kind == "sinh":
            return np.sinh(self.a * np.asarray(x)) / math.sinh(self.a)
        raise ParameterError(f"unknown mollifier shape {self.kind!r}")


@lru_cache(maxsize=8)
def mu_sieve(n: int) -> np.ndarray:
    """Mobius function on 0..n by a linear sieve."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(n + 1, dtype=bool)
    primes: list[int] = []
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


@dataclass(frozen=True)
class MollifierCoefficients:
    """c(h) = mu(h) h^{-1/2} P(1 - log h/log X) tabulated for h <= X."""

    X: float
    shape: MollifierShape
    coeffs: np.ndarray          # index h, c[0] unused

    @property
    def length(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, h: int) -> float:
        return float(self.coeffs[h])


def coefficients(X: float, shape: MollifierShape | str = "linear") -> MollifierCoefficients:
    if isinstance(shape, str):
        shape = MollifierShape(kind=shape)
    if X < 2:
        raise ParameterError(f"mollifier length X must be >= 2, got {X}")
    if X > _X_GUARD:
        raise CostGuardError(f"mollifier length {X} exceeds the guard {_X_GUARD}")
    n = int(math.floor(X))
    mu = mu_sieve(n)
    h = np.arange(n + 1, dtype=np.float64)
    c = np.zeros(n + 1)
    hh = h[1:]
    c[1:] = mu[1:] / np.sqrt(hh) * shape(1.0 - np.log(hh) / math.log(X))
    c[1] = 1.0
    return MollifierCoefficients(X=float(X), shape=shape, coeffs=c)


def mollifier_values(coeffs: MollifierCoefficients, chi, s) -> np.ndarray:
    """M(s, chi) = sum_m c(m) m^{1/2} chi(m) m^{-s}, vectorized over s."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    n = coeffs.length
    m = np.arange(1, n + 1, dtype=np.float64)
    w = coeffs.coeffs[1:] * np.sqrt(m)              # = mu(m) P(...)
    chiv = np.array([chi.values[mm % chi.q] for mm in range(1, n + 1)])
    live = w * chiv
    keep = live != 0
    if not np.any(keep):
        return np.zeros(s_arr.shape, dtype=complex)
    lm = np.log(m[keep])
    E = np.exp(np.multiply.outer(-s_arr, lm))
    return E @ live[keep]


def mollifier_value(coeffs: MollifierCoefficients, chi, s: complex) -> complex:
    return complex(mollifier_values(coeffs, chi, np.array([complex(s)]))[0])


class _Kahan:
    __slots__ = ("s", "c")

    def __init__(self, zero):
        self.s = zero
        self.c = zero * 0

    def add(self, x):
        y = x - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t


def _bilinear_many(c: np.ndarray, mu: np.ndarray,
                   sides: list[np.ndarray],
                   pairs: list[tuple[int, int]]) -> list[complex]:
    """sum_{h,k} c(h)c(k) sides[i][h1] sides[j][k1] for each (i, j) in pairs."""
    n = len(c) - 1
    sq = np.nonzero(mu[1:n + 1] != 0)[0] + 1
    accs = [_Kahan(complex(0.0)) for _ in pairs]
    A = np.empty(len(sides), dtype=complex)
    for g0 in sq:
        lim = n // int(g0)
        if lim < 1:
            break
        for d in sq:
            d = int(d)
            if d > lim:
                break
            if math.gcd(int(g0), d) != 1:
                continue
            step = int(g0) * d
            m_max = n // step
            cs = c[step::step][:m_max]
            for i, side in enumerate(sides):
                A[i] = np.dot(cs, side[d::d][:m_max])
            mud = float(mu[d])
            for acc, (i, j) in zip(accs, pairs):
                acc.add(mud * A[i] * A[j])
    return [acc.s for acc in accs]


def _as_coeffs(X) -> MollifierCoefficients:
    if isinstance(X, MollifierCoefficients):
        return X
    return coefficients(float(X))


def direct_bilinear(X, alpha: complex = 0.0, beta: complex = 0.0) -> complex:
    """Exact sum_{h,k<=X} c(h) c(k) l^{-1} h1^{-alpha} k1^{-beta}.

    Valid for any complex alpha, beta; the closed asymptotic form
    (:func:`asymptotic_bilinear`) only applies for alpha, beta = O(1/log X).
    """
    co = _as_coeffs(X)
    n = co.length
    mu = mu_sieve(n)
    x = np.arange(n + 1, dtype=np.float64)
    x[0] = 1.0
    fa = np.exp(-(0.5 + complex(alpha)) * np.log(x))
    if beta == alpha:
        fb = fa
    else:
        fb = np.exp(-(0.5 + complex(beta)) * np.log(x))
    (total,) = _bilinear_many(co.coeffs, mu, [fa, fb], [(0, 1)])
    if complex(alpha).imag == 0.0 and complex(beta).imag == 0.0:
        return float(total.real)
    return complex(total)


def asymptotic_bilinear(X: float, alpha: complex = 0.0,
                        beta: complex = 0.0) -> complex:
    """1/log X + (alpha+beta)/2 + (alpha beta / 3) log X."""
    if X <= 1:
        raise ParameterError("X must exceed 1")
    lX = math.log(X)
    out = 1.0 / lX + (alpha + beta) / 2.0 + alpha * beta * lX / 3.0
    return complex(out) if isinstance(out, complex) else float(out)


@dataclass(frozen=True)
class SumComparison:
    direct: float
    asymptotic: float
    X: float

    @property
    def rel_error(self) -> float:
        return abs(self.direct - self.asymptotic) / abs(self.asymptotic)


@dataclass(frozen=True)
class VSums:
    """V0, V1, V2 with weights l^{1-2s}, l^{1-2s} log l, l^{1-2s} log h1 log k1
    inserted into the c(h)c(k)/l sum, with their closed asymptotics."""

    X: float
    sigma: float
    v0: SumComparison
    v1: SumComparison
    v2: SumComparison


def _v_direct(co: MollifierCoefficients, sigma: float) -> tuple[float, float, float]:
    n = co.length
    mu = mu_sieve(n)
    x = np.arange(n + 1, dtype=np.float64)
    x[0] = 1.0
    lx = np.log(x)
    A = x ** (-sigma)
    B = A * lx
    s00, s01, s11 = _bilinear_many(co.coeffs, mu,
                                   [A.astype(complex), B.astype(complex)],
                                   [(0, 0), (0, 1), (1, 1)])
    return s00.real, s01.real, s11.real


def v_sums(X, sigma: float) -> VSums:
    """Direct vs asymptotic V0, V1, V2 at the given sigma (sigma != 1/2 is
    not required here; the weights are plain powers)."""
    co = _as_coeffs(X)
    d0, d1, d2 = _v_direct(co, sigma)
    lX = math.log(co.X)
    u = 0.5 - sigma
    a0 = 1.0 / lX - u + u * u * lX / 3.0
    a1 = -0.5 + u * lX / 3.0
    a2 = lX / 3.0
    return VSums(
        X=co.X, sigma=float(sigma),
        v0=SumComparison(direct=d0, asymptotic=a0, X=co.X),
        v1=SumComparison(direct=d1, asymptotic=a1, X=co.X),
        v2=SumComparison(direct=d2, asymptotic=a2, X=co.X),
    )


def _zeta_derivs(arg: float, mode: str) -> tuple[float, float, float]:
    """(zeta, zeta', zeta'') at ``arg``: polar approximation or true values."""
    if mode == "polar":
        u = arg - 1.0
        return 1.0 / u, -1.0 / u ** 2, 2.0 / u ** 3
    if mode == "true":
        import mpmath as mp
        with mp.workdps(30):
            return (float(mp.zeta(arg)),
                    float(mp.zeta(arg, derivative=1)),
                    float(mp.zeta(arg, derivative=2)))
    raise ParameterError(f"unknown zeta mode {mode!r}")


def v_closed_form(h: int, k: int, sigma: float, r: float, qtilde: float,
                  zeta_mode: str = "polar") -> float:
    """The closed-form diagonal weight V(h, k) attached to a reduced pair.

    (log qtilde^r)^2 V(h,k) =
        l^{1-2s} [ log(q^r/h1) log(q^r/k1) z(2s)
                   + (log(q^r/h1) + log(q^r/k1)) z'(2s) + z''(2s) ]
        + qtilde^{1-2s} { same line with s -> 1-s, r -> 1-r }.
    """
    if h < 1 or k < 1:
        raise ParameterError("h, k must be positive")
    if abs(2.0 * sigma - 1.0) < 1e-12:
        raise ParameterError("sigma = 1/2 puts the zeta arguments on the pole")
    g = math.gcd(h, k)
    h1, k1 = h // g, k // g
    lq = math.log(qtilde)

    def line(sig: float, rr: float) -> float:
        z0, z1, z2 = _zeta_derivs(2.0 * sig, zeta_mode)
        Lr = rr * lq
        lh = Lr - math.log(h1)
        lk = Lr - math.log(k1)
        ell = math.sqrt(h1 * k1)
        return ell ** (1.0 - 2.0 * sig) * (lh * lk * z0 + (lh + lk) * z1 + z2)

    main = line(sigma, r)
    mirror = qtilde ** (1.0 - 2.0 * sigma) * line(1.0 - sigma, 1.0 - r)
    return (main + mirror) / (r * lq) ** 2


@dataclass(frozen=True)
class DiagonalComparison:
    X: float
    qtilde: float
    sigma: float
    r: float
    theta: float
    R: float
    direct: float        # the exact Eq.-style double sum over c(h)c(k)/l V(h,k)
    predicted: float     # c(theta, r, R) from the constants module

    @property
    def ratio(self) -> float:
        return self.direct / self.predicted


def diagonal_main_term(X, qtilde: float, sigma: float, r: float,
                       zeta_mode: str = "polar") -> DiagonalComparison:
    """Exact double sum sum_{h,k} c(h)c(k) l^{-1} V(h,k) vs the predicted
    main-term constant.

    Expanding the V(h,k) bracket over log h1, log k1 reduces the double sum
    to the V0, V1, V2 primitives at sigma and 1-sigma, which the bilinear
    engine evaluates exactly.
    """
    co = _as_coeffs(X)
    if abs(2.0 * sigma - 1.0) < 1e-12:
        raise ParameterError("sigma = 1/2 puts the zeta arguments on the pole")
    if r == 0.0:
        raise ParameterError("r must be nonzero")
    lq = math.log(qtilde)
    V0a, V1a, V2a = _v_direct(co, sigma)
    V0b, V1b, V2b = _v_direct(co, 1.0 - sigma)

    def line(V0: float, V1: float, V2: float, sig: float, rr: float) -> float:
        z0, z1, z2 = _zeta_derivs(2.0 * sig, zeta_mode)
        Lr = rr * lq
        return ((V0 * Lr * Lr - 2.0 * V1 * Lr + V2) * z0
                + 2.0 * (V0 * Lr - V1) * z1 + V0 * z2)

    total = line(V0a, V1a, V2a, sigma, r) \
        + qtilde ** (1.0 - 2.0 * sigma) * line(V0b, V1b, V2b, 1.0 - sigma, 1.0 - r)
    direct = total / (r * lq) ** 2

    theta = math.log(co.X) / lq
    R = (0.5 - sigma) * lq
    predicted = levinson_c(LevinsonParams(theta=theta, r=r, R=R))
    return DiagonalComparison(X=co.X, qtilde=qtilde, sigma=sigma, r=r,
                              theta=theta, R=R, direct=direct,
                              predicted=predicted)
