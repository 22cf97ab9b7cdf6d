"""Character sums of Cayley (di)graphs and Alon-Chung type edge bounds.

For ``A`` a subset of ``G`` the Cayley digraph has arcs ``(x, y)`` with
``y - x`` in ``A``; every character ``chi`` is an eigenvector with eigenvalue
``sum_{a in A} chi(a)``.  Bounds are returned as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import ElementSet, GroupSpec, subgroups_of_prime_index

__all__ = [
    "SNAP_TOL",
    "CharacterDescriptor",
    "SpectrumReport",
    "cayley_spectrum",
    "lambda_min_z2n",
    "r_min_z3n",
    "st_spectral_lower_bound_z3n",
    "alon_chung_bound",
    "directed_alon_chung_bound",
    "ordered_edge_count",
]

SNAP_TOL = 1e-6
REAL_TOL = 1e-9


@dataclass(frozen=True)
class CharacterDescriptor:
    group: GroupSpec
    freq: tuple[int, ...]

    def __call__(self, x) -> complex:
        c = self.group.coords(self.group._as_index(x))
        phase = sum(t * cj / m for t, cj, m in zip(self.freq, c, self.group.factors))
        return complex(np.exp(2j * np.pi * phase))

    @property
    def is_trivial(self) -> bool:
        return not any(self.freq)

    @classmethod
    def from_index(cls, G: GroupSpec, index: int) -> "CharacterDescriptor":
        return cls(G, G.coords(index))


@dataclass(frozen=True)
class SpectrumReport:
    """``eigenvalues[i]`` belongs to the character whose frequency vector has canonical index ``i``."""

    group: GroupSpec
    eigenvalues: np.ndarray
    directed: bool
    lambda_min: float | None
    r_min: float
    lambda_min_exact: Fraction | None = None
    r_min_exact: Fraction | None = None


def _snap(value: float, denom: int) -> Fraction:
    scaled = value * denom
    near = round(scaled)
    if abs(scaled - near) > SNAP_TOL * denom:
        raise ArithmeticError(f"character sum {value!r} is not a multiple of 1/{denom}")
    return Fraction(near, denom)


def _character_sums(A: ElementSet) -> np.ndarray:
    G = A.group
    f = A.bitmap.reshape(G.factors).astype(np.float64)
    # n * ifftn gives sum_x f(x) exp(+2 pi i <t, x>)
    return (np.fft.ifftn(f) * G.order).reshape(-1)


def _is_symmetric(A: ElementSet) -> bool:
    return A.negate() == A


def cayley_spectrum(A: ElementSet, directed: bool = False) -> SpectrumReport:
    G = A.group
    if not directed:
        if A.cardinality and A.bitmap[0]:
            raise ValueError("undirected Cayley graph needs 0 not in A")
        if not _is_symmetric(A):
            raise ValueError("undirected Cayley graph needs A = -A")
    eig = _character_sums(A)
    eig.setflags(write=False)
    r_min = float(eig.real.min())
    lam = None
    if not directed:
        if np.abs(eig.imag).max(initial=0.0) > REAL_TOL * max(1, A.cardinality):
            raise ArithmeticError("symmetric set produced non-real eigenvalues")
        lam = r_min
    lam_x = r_x = None
    if G.is_elementary(2):
        r_x = _snap(r_min, 1)
        lam_x = r_x if not directed else None
    elif G.is_elementary(3):
        r_x = _snap(r_min, 2)
        lam_x = r_x if not directed else None
    return SpectrumReport(G, eig, directed, lam, r_min, lam_x, r_x)


def _require(G: GroupSpec, q: int, n: int | None) -> None:
    if not G.is_elementary(q) or (n is not None and G.rank != n):
        want = f"Z{q}^{n}" if n is not None else f"Z{q}^k"
        raise ValueError(f"expected ambient group {want}, got {G.name}")


def lambda_min_z2n(n: int | None, A: ElementSet) -> int:
    """``min |A & H| - |A - H|`` over index-2 subgroups ``H`` of ``Z_2^n``."""
    _require(A.group, 2, n)
    if A.cardinality == 0:
        return 0
    best = A.cardinality
    for H in subgroups_of_prime_index(A.group, 2):
        inside = int(np.count_nonzero(A.bitmap & H.carrier.bitmap))
        best = min(best, inside - (A.cardinality - inside))
    return best


def r_min_z3n(n: int | None, A: ElementSet) -> Fraction:
    """``min |A & H| - |A - H| / 2`` over index-3 subgroups ``H`` of ``Z_3^n``."""
    _require(A.group, 3, n)
    if A.cardinality == 0:
        return Fraction(0)
    best = Fraction(A.cardinality)
    for H in subgroups_of_prime_index(A.group, 3):
        inside = int(np.count_nonzero(A.bitmap & H.carrier.bitmap))
        best = min(best, inside - Fraction(A.cardinality - inside, 2))
    return best


def st_spectral_lower_bound_z3n(n: int | None, A: ElementSet) -> Fraction:
    _require(A.group, 3, n)
    N = A.group.order
    a = A.cardinality
    r = r_min_z3n(n, A)
    return Fraction(a**3, N) + r * a * (1 - Fraction(a, N))


def _lower_rational(x: float) -> Fraction:
    # rational just below x; keeps bounds sound when the eigenvalue is irrational
    scale = 1 << 32
    return Fraction(math.floor((x - 1e-9) * scale), scale)


def _edge_form(D: int, N: int, lam: Fraction, u: int) -> Fraction:
    return Fraction(D * u * u, N) + lam * Fraction(u * (N - u), N)


def alon_chung_bound(A: ElementSet, U: ElementSet) -> Fraction:
    """Lower bound on ``2 e(G_A[U])`` from the smallest eigenvalue of ``G_A``."""
    G = A.group
    U._check(A)
    if A.cardinality and A.bitmap[0]:
        raise ValueError("Alon-Chung bound needs 0 not in A")
    if not _is_symmetric(A):
        raise ValueError("Alon-Chung bound needs A = -A")
    if G.is_elementary(2):
        lam = Fraction(lambda_min_z2n(None, A))
    else:
        spec = cayley_spectrum(A, directed=False)
        lam = spec.lambda_min_exact if spec.lambda_min_exact is not None else _lower_rational(spec.lambda_min)
    return _edge_form(A.cardinality, G.order, lam, U.cardinality)


def directed_alon_chung_bound(A: ElementSet, U: ElementSet) -> Fraction:
    """Lower bound on the arc count of the Cayley digraph induced on ``U``."""
    G = A.group
    U._check(A)
    spec = cayley_spectrum(A, directed=True)
    r = spec.r_min_exact if spec.r_min_exact is not None else _lower_rational(spec.r_min)
    return _edge_form(A.cardinality, G.order, r, U.cardinality)


def ordered_edge_count(A: ElementSet, U: ElementSet) -> int:
    """``#{(x, y) in U^2 : y - x in A}``, enumerated directly."""
    G = A.group
    iu = U.indices
    total = 0
    for x in iu:
        total += int(np.count_nonzero(A.bitmap[G.sub_arrays(iu, x)]))
    return total
