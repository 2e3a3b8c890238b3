"""Dirichlet character groups: enumeration, conductors, Gauss sums.

Characters mod q are built from the cyclic decomposition of (Z/q)^*:
one cyclic factor per odd prime power (generated by a primitive root),
and for the 2-part either nothing (2), <3> (4), or <-1> x <5> (2^e, e>=3).
A character is a tuple of exponents against those generators; its value
table, parity, conductor and primitivity all fall out of the exponents.

Value tables are exact roots of unity e(j/E) with E the group exponent,
so orthogonality relations hold to machine rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import ParameterError

__all__ = [
    "DirichletCharacter",
    "RootNumber",
    "enumerate_characters",
    "primitive_count",
    "gauss_sum",
    "root_number",
    "euler_phi",
]


def _factorize(q: int) -> list[tuple[int, int]]:
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    phi = 1
    for p, e in _factorize(q):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def _primitive_root(p: int, e: int) -> int:
    """A generator of (Z/p^e)^* for odd p."""
    pe = p ** e
    order = (p - 1) * p ** (e - 1)
    fac = sorted({f for f, _ in _factorize(order)})
    for g in range(2, pe):
        if math.gcd(g, pe) != 1:
            continue
        if all(pow(g, order // f, pe) != 1 for f in fac):
            return g
    raise RuntimeError(f"no primitive root mod {p}^{e}")  # unreachable


@dataclass(frozen=True)
class _Component:
    """One cyclic factor of (Z/q)^*: generator g of order n inside Z/pe."""
    pe: int       # the prime power this component lives in
    g: int        # generator (as residue mod pe)
    n: int        # order of g


def _unit_group(q: int) -> list[_Component]:
    comps: list[_Component] = []
    for p, e in _factorize(q):
        pe = p ** e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                comps.append(_Component(pe, 3, 2))
            else:
                comps.append(_Component(pe, pe - 1, 2))        # <-1>
                comps.append(_Component(pe, 5, 2 ** (e - 2)))  # <5>
        else:
            comps.append(_Component(pe, _primitive_root(p, e), (p - 1) * p ** (e - 1)))
    return comps


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q with a dense value table.

    ``values[a]`` is chi(a mod q); zero on residues sharing a factor with q.
    ``nu`` is 0 for even characters (chi(-1)=1) and 1 for odd ones.
    """

    q: int
    values: np.ndarray = field(repr=False, compare=False)
    nu: int
    conductor: int
    index: int                      # position in enumerate_characters(q)
    exponents: tuple[int, ...]      # exponents against the group generators

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exponents)

    @property
    def is_real(self) -> bool:
        return bool(np.max(np.abs(self.values.imag)) < 1e-14)

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.q])

    def conjugate(self) -> "DirichletCharacter":
        if self.q == 1:
            return self
        comps = _unit_group(self.q)
        idx = 0
        for k, comp in zip(self.exponents, comps):
            idx = idx * comp.n + ((comp.n - k) % comp.n)
        return enumerate_characters(self.q)[idx]

    def label(self) -> str:
        return f"chi_{self.q}_{self.index}"


@dataclass(frozen=True)
class RootNumber:
    epsilon: complex


def _local_conductor_odd(p: int, n: int, k: int) -> int:
    """Conductor of the exponent-k character on the cyclic factor mod p^e."""
    if k % n == 0:
        return 1
    m = n // math.gcd(n, k)          # order of the local character
    vp = 0
    while m % p == 0:
        m //= p
        vp += 1
    return p ** (vp + 1)


def _conductor(q: int, comps: list[_Component], ks: tuple[int, ...]) -> int:
    cond = 1
    i = 0
    fac = dict(_factorize(q))
    two_e = fac.get(2, 0)
    if two_e >= 3:
        k_minus, k_five = ks[0], ks[1]
        n_five = comps[1].n
        if k_five % n_five != 0:
            m5 = n_five // math.gcd(n_five, k_five)
            j = m5.bit_length() - 1           # m5 = 2^j, j >= 1
            cond *= 2 ** (j + 2)
        elif k_minus % 2 != 0:
            cond *= 4
        i = 2
    elif two_e == 2:
        if ks[0] % 2 != 0:
            cond *= 4
        i = 1
    for comp in comps[i:]:
        p = next(pp for pp, _ in _factorize(comp.pe))
        cond *= _local_conductor_odd(p, comp.n, ks[i])
        i += 1
    return cond


@lru_cache(maxsize=512)
def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q in a fixed (exponent-lexicographic) order."""
    if q < 1:
        raise ParameterError(f"modulus must be >= 1, got {q}")
    if q == 1:
        chi = DirichletCharacter(
            q=1, values=np.ones(1, dtype=complex), nu=0, conductor=1,
            index=0, exponents=())
        return (chi,)

    comps = _unit_group(q)
    E = 1
    for comp in comps:
        E = E * comp.n // math.gcd(E, comp.n)   # lcm -> group exponent

    coprime = np.array([a for a in range(q) if math.gcd(a, q) == 1])

    # Discrete logs: decompose each unit against the generators via CRT.
    dlogs = np.zeros((len(comps), q), dtype=np.int64)
    fac = dict(_factorize(q))
    for ci, comp in enumerate(comps):
        pw = {}
        x = 1
        for j in range(comp.n):
            pw[x] = j
            x = (x * comp.g) % comp.pe
        for a in coprime:
            r = int(a) % comp.pe
            dlogs[ci, a] = pw.get(r, 0)   # 2-part fixed up below
    # For 2^e (e>=3) the unit r decomposes as (-1)^x * 5^y; fix up jointly.
    if fac.get(2, 0) >= 3:
        pe = 2 ** fac[2]
        pw5 = {}
        x = 1
        for j in range(pe // 4):
            pw5[x] = j
            x = (x * 5) % pe
        for a in coprime:
            r = int(a) % pe
            if r in pw5:
                dlogs[0, a], dlogs[1, a] = 0, pw5[r]
            else:
                dlogs[0, a], dlogs[1, a] = 1, pw5[(-r) % pe]

    roots = np.exp(2j * np.pi * np.arange(E) / E)
    weights = np.array([E // comp.n for comp in comps], dtype=np.int64)
    minus_one_logs = dlogs[:, (q - 1) % q]

    chars: list[DirichletCharacter] = []
    # Exponent tuples in lexicographic order, last component fastest.
    radices = [comp.n for comp in comps]
    total = 1
    for n in radices:
        total *= n
    for idx in range(total):
        ks = []
        rem = idx
        for n in reversed(radices):
            ks.append(rem % n)
            rem //= n
        ks_t = tuple(reversed(ks))
        kw = np.array(ks_t, dtype=np.int64) * weights
        j_all = (kw[:, None] * dlogs[:, coprime]).sum(axis=0) % E
        values = np.zeros(q, dtype=complex)
        values[coprime] = roots[j_all]
        jm1 = int((kw * minus_one_logs).sum()) % E
        nu = 0 if jm1 == 0 else 1
        chars.append(DirichletCharacter(
            q=q, values=values, nu=nu,
            conductor=_conductor(q, comps, ks_t),
            index=idx, exponents=ks_t))
    return tuple(chars)


def primitive_count(q: int) -> int:
    """phi^*(q) = (mu * phi)(q), the number of primitive characters mod q."""
    if q < 1:
        raise ParameterError(f"modulus must be >= 1, got {q}")
    total = 0
    for d in range(1, q + 1):
        if q % d:
            continue
        m = q // d
        # mu(m)
        mu = 1
        for p, e in _factorize(m):
            if e > 1:
                mu = 0
                break
            mu = -mu
        total += mu * euler_phi(d)
    return total


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_a chi(a) e(a/q) by direct O(q) summation."""
    q = chi.q
    a = np.arange(q)
    return complex(np.sum(chi.values * np.exp(2j * np.pi * a / q)))


def root_number(chi: DirichletCharacter) -> RootNumber:
    """epsilon_chi = tau(chi) / (i^nu sqrt(q)); unimodular for primitive chi."""
    if not chi.is_primitive:
        raise ParameterError(
            f"root number requires a primitive character; {chi.label()} has "
            f"conductor {chi.conductor} < {chi.q}")
    eps = _epsilon(chi)
    if abs(abs(eps) - 1.0) > 1e-10:
        raise ParameterError(
            f"|epsilon| = {abs(eps)} is not 1 for {chi.label()}; "
            "Gauss-sum normalization failed")
    return RootNumber(epsilon=eps)


def _epsilon(chi: DirichletCharacter) -> complex:
    """Gauss-sum normalization without the primitivity gate (so the functional
    equation residual can be *demonstrated* to fail on imprimitive input)."""
    return gauss_sum(chi) / (1j ** chi.nu * math.sqrt(chi.q))
