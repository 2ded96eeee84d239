"""Exact quantum-number bookkeeping for the central spin model.

A central spin of size s couples uniformly (or with per-site strengths) to a
bath of N spin-1/2's.  Every spin label in play (s, j, m, m_s, m_j) is a
half-integer; storing twice the value as a plain int keeps all range and
parity rules in exact integer arithmetic.  Floats enter only inside the
numerical kernels downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored as twice its value.

    Ordering, addition and subtraction are exact; float conversion is exact
    for |twice| < 2**52.
    """

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int):
            raise TypeError(f"twice must be int, got {type(self.twice).__name__}")

    @classmethod
    def from_string(cls, text):
        """Parse '3/2', '-1/2', '2' etc. without going through floats."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            if int(den) != 2:
                raise ValueError(f"not a half-integer: {text!r}")
            return cls(int(num))
        return cls(2 * int(text))

    @property
    def is_integer(self):
        return self.twice % 2 == 0

    def __add__(self, other):
        if isinstance(other, HalfInt):
            return HalfInt(self.twice + other.twice)
        if isinstance(other, int):
            return HalfInt(self.twice + 2 * other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, HalfInt):
            return HalfInt(self.twice - other.twice)
        if isinstance(other, int):
            return HalfInt(self.twice - 2 * other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return HalfInt(2 * other - self.twice)
        return NotImplemented

    def __neg__(self):
        return HalfInt(-self.twice)

    def __mul__(self, other):
        if isinstance(other, int):
            return HalfInt(self.twice * other)
        return NotImplemented

    __rmul__ = __mul__

    def __float__(self):
        return self.twice / 2.0

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self):
        return f"HalfInt({self.twice})"


def halfint(x):
    """Coerce an int, a string like '3/2', or a HalfInt to HalfInt."""
    if isinstance(x, HalfInt):
        return x
    if isinstance(x, int):
        return HalfInt(2 * x)
    if isinstance(x, str):
        return HalfInt.from_string(x)
    raise TypeError(f"cannot interpret {x!r} as a half-integer")


def halfint_range(lo, hi):
    """Half-integers lo, lo+1, ..., hi (inclusive, unit steps)."""
    return [HalfInt(t) for t in range(lo.twice, hi.twice + 1, 2)]


ZERO = HalfInt(0)
HALF = HalfInt(1)


@dataclass(frozen=True)
class ModelParams:
    """Homogeneous model: field B on the central spin, uniform coupling A."""

    s: HalfInt
    N: int
    A: float
    B: float

    def __post_init__(self):
        object.__setattr__(self, "s", halfint(self.s))
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))
        if self.s.twice < 1:
            raise ValueError(f"central spin must be >= 1/2, got {self.s}")
        if self.N < 1:
            raise ValueError(f"bath size must be >= 1, got {self.N}")
        if not (math.isfinite(self.A) and math.isfinite(self.B)):
            raise ValueError("A and B must be finite")


@dataclass(frozen=True)
class InhomModelParams:
    """Inhomogeneous model: couplings set by site parameters eps0, eps_1..eps_N.

    Effective per-site coupling is A_j = 1 / (2 s (eps0 - eps_j)); the
    homogeneous model is the limit of all eps_j equal.
    """

    s: HalfInt
    N: int
    B: float
    eps0: float
    eps: tuple

    def __post_init__(self):
        object.__setattr__(self, "s", halfint(self.s))
        object.__setattr__(self, "B", float(self.B))
        object.__setattr__(self, "eps0", float(self.eps0))
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if self.s.twice < 1:
            raise ValueError(f"central spin must be >= 1/2, got {self.s}")
        if self.N < 1:
            raise ValueError(f"bath size must be >= 1, got {self.N}")
        if len(self.eps) != self.N:
            raise ValueError(f"need {self.N} site parameters, got {len(self.eps)}")
        if any(e == self.eps0 for e in self.eps):
            raise ValueError("eps0 must differ from every eps_j")

    @property
    def epsilons_distinct(self):
        """Whether all site parameters are pairwise distinct (nondegeneracy flag)."""
        return len(set(self.eps)) == len(self.eps)

    @property
    def couplings(self):
        """Per-site couplings A_j = 1 / (2 s (eps0 - eps_j))."""
        s = float(self.s)
        return tuple(1.0 / (2.0 * s * (self.eps0 - e)) for e in self.eps)


@dataclass(frozen=True)
class SectorKey:
    """Conserved labels of a Hamiltonian block: bath spin j, total S^z value m."""

    j: HalfInt
    m: HalfInt

    def __post_init__(self):
        object.__setattr__(self, "j", halfint(self.j))
        object.__setattr__(self, "m", halfint(self.m))
        if self.j.twice < 0:
            raise ValueError(f"bath spin must be >= 0, got {self.j}")


def bath_spin_values(N):
    """Allowed total bath spins j = N/2, N/2 - 1, ..., down to 0 or 1/2."""
    if N < 1:
        raise ValueError("bath size must be >= 1")
    return [HalfInt(t) for t in range(N, -1, -2)]


def sector_keys(s, N):
    """All (j, m) blocks for given central spin and bath size.

    Ordered j descending, then m descending; this is the canonical output
    order used everywhere downstream.
    """
    s = halfint(s)
    keys = []
    for j in bath_spin_values(N):
        top = j + s
        for t in range(top.twice, -top.twice - 1, -2):
            keys.append(SectorKey(j, HalfInt(t)))
    return keys


def sector_dimension(s, key):
    """Number of (m_s, m_j) pairs with m_s + m_j = m inside a (j, m) block.

    m_s runs over [-s, s] and m_j over [-j, j] in unit steps, so the count is
    min(s, m + j) - max(-s, m - j) + 1.
    """
    s = halfint(s)
    j, m = key.j, key.m
    if m.twice > (j + s).twice or m.twice < -(j + s).twice:
        raise ValueError(f"m={m} outside [-(j+s), j+s] for j={j}, s={s}")
    if (m.twice - j.twice - s.twice) % 2 != 0:
        raise ValueError(f"m={m} has wrong parity for j={j}, s={s}")
    lo = max(-s.twice, m.twice - j.twice)
    hi = min(s.twice, m.twice + j.twice)
    return (hi - lo) // 2 + 1


def bath_spin_multiplicity(N, j):
    """How many times total spin j appears in N coupled spin-1/2's.

    Standard Catalan-triangle count C(N, N/2 - j) - C(N, N/2 - j - 1);
    multiplicities satisfy sum_j mult(j) (2j+1) = 2**N.
    """
    j = halfint(j)
    if j.twice < 0 or j.twice > N or (N - j.twice) % 2 != 0:
        raise ValueError(f"bath spin j={j} invalid for N={N}")
    k = (N - j.twice) // 2
    lower = math.comb(N, k - 1) if k >= 1 else 0
    return math.comb(N, k) - lower
