"""Brute-force oracles for the entropic Freiman-Ruzsa theorem, its
conditional corollary, and the sumset-entropy conjecture search.

The subspace scan is the oracle: every subspace of F2^k is enumerated,
distances are exact, and argmin ties break deterministically (smallest
dimension first, then canonical basis order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GuardError, TheoremViolationError
from .f2 import Subspace, enumerate_subspaces
from .info import (DenseDistribution, JointDistribution, cond_ruzsa_dist,
                   cond_ruzsa_to_plain, entropy_bits, ruzsa_dist)

SCAN_MAX_K = 5
PFR_FACTOR = 6.0
CEFR_FACTOR = 7.0
FLOAT_TOL = 1e-9


@lru_cache(maxsize=None)
def _scan_list(k: int) -> tuple[tuple[Subspace, DenseDistribution], ...]:
    if k > SCAN_MAX_K:
        raise GuardError(f"subspace scan guarded at k <= {SCAN_MAX_K}")
    subs = enumerate_subspaces(k)
    subs.sort(key=lambda s: (s.dim, s.basis))
    return tuple((s, DenseDistribution.subspace_uniform(s)) for s in subs)


@dataclass(frozen=True)
class FrReport:
    best_subspace: Subspace
    best_distance: float
    reference_distance: float
    factor: float


def nearest_subspace(p: DenseDistribution) -> tuple[Subspace, float]:
    """argmin over subspaces G of d(U_G, X), exact scan."""
    best_s, best_d = None, math.inf
    for s, u in _scan_list(p.k):
        d = ruzsa_dist(p, u)
        if d < best_d - 1e-15:
            best_s, best_d = s, d
    return best_s, best_d


def pfr_check(p: DenseDistribution, q: DenseDistribution) -> FrReport:
    """Entropic Freiman-Ruzsa: min_G d(U_G, X) <= 6 d(X, Y)."""
    if p.k != q.k:
        raise ValueError("dimension mismatch")
    ref = ruzsa_dist(p, q)
    best_s, best_d = nearest_subspace(p)
    if best_d > PFR_FACTOR * ref + FLOAT_TOL:
        raise TheoremViolationError(
            f"min subspace distance {best_d} exceeds 6*d(X,Y) = {PFR_FACTOR * ref}")
    factor = best_d / ref if ref > 0 else 0.0
    return FrReport(best_s, best_d, ref, factor)


def cefr_check(j_xa: JointDistribution, j_yb: JointDistribution) -> FrReport:
    """Conditional corollary: min_G d(Y|B, U_G) <= 7 d(X|A, Y|B)."""
    if j_xa.ka != j_yb.ka:
        raise ValueError("X and Y components must share k")
    if j_xa.ka > SCAN_MAX_K - 1:
        raise GuardError("conditional scan guarded at k <= 4")
    ref = cond_ruzsa_dist(j_xa, j_yb)
    best_s, best_d = None, math.inf
    for s, u in _scan_list(j_yb.ka):
        d = cond_ruzsa_to_plain(j_yb, u)
        if d < best_d - 1e-15:
            best_s, best_d = s, d
    if best_d > CEFR_FACTOR * ref + FLOAT_TOL:
        raise TheoremViolationError(
            f"min conditional distance {best_d} exceeds 7*d(X|A,Y|B) = {CEFR_FACTOR * ref}")
    factor = best_d / ref if ref > 0 else 0.0
    return FrReport(best_s, best_d, ref, factor)


def projection_entropy(p: DenseDistribution, g: Subspace) -> float:
    """H of the pushforward of X onto the cosets of G; equals
    H(U_G + X) - H(U_G)."""
    if g.ambient_dim != p.k:
        raise ValueError("dimension mismatch")
    reps: dict[int, int] = {}
    mass = np.zeros(1 << (p.k - g.dim))
    next_rep = 0
    for x in range(1 << p.k):
        r = x
        for row in g.basis:
            pivot = (row & -row).bit_length() - 1
            if (r >> pivot) & 1:
                r ^= row
        if r not in reps:
            reps[r] = next_rep
            next_rep += 1
        mass[reps[r]] += p.probs[x]
    return entropy_bits(mass)


def conjecture_search(p: DenseDistribution, c1: float) -> tuple[Subspace | None, float]:
    """Smallest-dimension subspace G with
    H(U_G + X) - H(U_G) <= (1 + c1) (H(X + X') - H(X)),
    and the empirical ratio dim(G)/H(X)."""
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    hx = p.entropy()
    if hx <= 0.0:
        return Subspace.zero(p.k), 0.0
    rhs = (1.0 + c1) * (p.convolve(p).entropy() - hx)
    for s, u in _scan_list(p.k):
        lhs = p.convolve(u).entropy() - s.dim
        if lhs <= rhs + FLOAT_TOL:
            return s, s.dim / hx
    return None, math.inf
