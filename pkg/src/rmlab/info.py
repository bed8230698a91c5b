"""Exact distributions over F2^k and the information measures on them.

All logarithms are base 2 and 0*log(0) is 0; probabilities below 1e-15
are treated as exact zeros inside entropy sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError
from .f2 import Subspace

MAX_K = 20
PROB_FLOOR = 1e-15
MASS_TOL = 1e-12
DIRECT_CONV_MAX_K = 10


def binary_entropy(p: float) -> float:
    """h(p) = -p log2 p - (1-p) log2 (1-p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    out = 0.0
    if p > PROB_FLOOR:
        out -= p * math.log2(p)
    if 1.0 - p > PROB_FLOOR:
        out -= (1.0 - p) * math.log2(1.0 - p)
    return out


def entropy_bits(probs: np.ndarray) -> float:
    """Entropy in bits of an arbitrary-shape probability table."""
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > PROB_FLOOR]
    return float(-np.sum(p * np.log2(p)))


def _check_mass(probs: np.ndarray) -> None:
    total = float(probs.sum())
    if abs(total - 1.0) > MASS_TOL:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    if float(probs.min(initial=0.0)) < -PROB_FLOOR:
        raise ValueError("negative probability")


def _wht_inplace(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along `axis`."""
    a = np.moveaxis(a, axis, -1)
    n = a.shape[-1]
    h = 1
    while h < n:
        a = a.reshape(a.shape[:-1] + (n // (2 * h), 2, h))
        lo = a[..., 0, :] + a[..., 1, :]
        hi = a[..., 0, :] - a[..., 1, :]
        a = np.stack([lo, hi], axis=-2).reshape(a.shape[:-3] + (n,))
        h *= 2
    return np.moveaxis(a, -1, axis)


def xor_convolve_tables(p: np.ndarray, q: np.ndarray, method: str = "auto") -> np.ndarray:
    """Distribution of X+Y over F2^k for independent X ~ p, Y ~ q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("dimension mismatch in convolution")
    n = p.size
    k = n.bit_length() - 1
    if method == "auto":
        method = "direct" if k <= DIRECT_CONV_MAX_K else "wht"
    if method == "direct":
        idx = np.bitwise_xor.outer(np.arange(n), np.arange(n))
        return q[idx] @ p
    if method == "wht":
        out = _wht_inplace(_wht_inplace(p.copy()) * _wht_inplace(q.copy())) / n
        return np.maximum(out, 0.0)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class DenseDistribution:
    """Exact probability table over F2^k, indexed by the integer value."""

    k: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.k <= MAX_K:
            raise GuardError(f"k={self.k} outside [0, {MAX_K}]")
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (1 << self.k,):
            raise ValueError(f"need {1 << self.k} probabilities, got shape {p.shape}")
        _check_mass(p)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @classmethod
    def point_mass(cls, k: int, x: int = 0) -> "DenseDistribution":
        p = np.zeros(1 << k)
        p[x] = 1.0
        return cls(k, p)

    @classmethod
    def uniform(cls, k: int) -> "DenseDistribution":
        return cls(k, np.full(1 << k, 1.0 / (1 << k)))

    @classmethod
    def bernoulli(cls, delta: float) -> "DenseDistribution":
        return cls(1, np.array([1.0 - delta, delta]))

    @classmethod
    def bernoulli_product(cls, k: int, delta: float) -> "DenseDistribution":
        idx = np.arange(1 << k)
        w = np.array([int(x).bit_count() for x in idx])
        return cls(k, delta ** w * (1.0 - delta) ** (k - w))

    @classmethod
    def subspace_uniform(cls, g: Subspace) -> "DenseDistribution":
        p = np.zeros(1 << g.ambient_dim)
        for x in g.elements():
            p[x] = 1.0
        return cls(g.ambient_dim, p / p.sum())

    def entropy(self) -> float:
        return entropy_bits(self.probs)

    def convolve(self, other: "DenseDistribution", method: str = "auto") -> "DenseDistribution":
        if self.k != other.k:
            raise ValueError(f"dimension mismatch: k={self.k} vs k={other.k}")
        return DenseDistribution(self.k, xor_convolve_tables(self.probs, other.probs, method))


@dataclass(frozen=True)
class JointDistribution:
    """Joint table over F2^ka x F2^kb; axis 0 is X, axis 1 is the side
    information Y (the component conditioned on)."""

    ka: int
    kb: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not (0 <= self.ka <= MAX_K and 0 <= self.kb <= MAX_K):
            raise GuardError("joint table dimensions out of range")
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (1 << self.ka, 1 << self.kb):
            raise ValueError(f"need shape {(1 << self.ka, 1 << self.kb)}, got {p.shape}")
        _check_mass(p)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @classmethod
    def independent(cls, p: DenseDistribution, q: DenseDistribution) -> "JointDistribution":
        return cls(p.k, q.k, np.outer(p.probs, q.probs))

    @classmethod
    def diagonal(cls, p: DenseDistribution) -> "JointDistribution":
        return cls(p.k, p.k, np.diag(p.probs))

    def entropy(self) -> float:
        return entropy_bits(self.probs)

    def marginal_x(self) -> DenseDistribution:
        return DenseDistribution(self.ka, self.probs.sum(axis=1))

    def marginal_y(self) -> DenseDistribution:
        return DenseDistribution(self.kb, self.probs.sum(axis=0))

    def swap(self) -> "JointDistribution":
        return JointDistribution(self.kb, self.ka, self.probs.T.copy())

    def cond_entropy(self) -> float:
        """H(X | Y) = H(X, Y) - H(Y)."""
        return self.entropy() - entropy_bits(self.probs.sum(axis=0))

    def mutual_info(self) -> float:
        return self.marginal_x().entropy() + self.marginal_y().entropy() - self.entropy()

    def conditionals_given_y(self) -> tuple[np.ndarray, np.ndarray]:
        """(P(Y=t), table of P(X|Y=t) rows); zero-mass slices stay zero."""
        py = self.probs.sum(axis=0)
        cond = np.zeros_like(self.probs.T)
        nz = py > PROB_FLOOR
        cond[nz] = self.probs.T[nz] / py[nz, None]
        return py, cond


def cond_entropy(j: JointDistribution) -> float:
    return j.cond_entropy()


def mutual_info(j: JointDistribution) -> float:
    return j.mutual_info()


def cond_mutual_info(probs_xyz: np.ndarray) -> float:
    """I(X, Y | Z) from a 3-axis joint table (axes X, Y, Z)."""
    p = np.asarray(probs_xyz, dtype=float)
    _check_mass(p)
    h_xz = entropy_bits(p.sum(axis=1))
    h_yz = entropy_bits(p.sum(axis=0))
    h_xyz = entropy_bits(p)
    h_z = entropy_bits(p.sum(axis=(0, 1)))
    return h_xz + h_yz - h_xyz - h_z


def convolve(p: DenseDistribution, q: DenseDistribution, method: str = "auto") -> DenseDistribution:
    return p.convolve(q, method)


def ruzsa_dist(p: DenseDistribution, q: DenseDistribution) -> float:
    """d(X, Y) = H(X'+Y') - (H(X') + H(Y'))/2 for independent copies
    (minus equals plus in F2)."""
    return p.convolve(q).entropy() - 0.5 * (p.entropy() + q.entropy())


def cond_ruzsa_dist(j_xa: JointDistribution, j_yb: JointDistribution) -> float:
    """d(X|A, Y|B) = H(X'+Y'|A', B') - (H(X'|A') + H(Y'|B'))/2, with
    (X', A') and (Y', B') independent copies of the two pairs."""
    if j_xa.ka != j_yb.ka:
        raise ValueError("X and Y components must share the same k")
    pa, conds_a = j_xa.conditionals_given_y()
    pb, conds_b = j_yb.conditionals_given_y()
    terms = []
    for ia in range(pa.size):
        if pa[ia] <= PROB_FLOOR:
            continue
        for ib in range(pb.size):
            if pb[ib] <= PROB_FLOOR:
                continue
            conv = xor_convolve_tables(conds_a[ia], conds_b[ib])
            terms.append(pa[ia] * pb[ib] * entropy_bits(conv))
    h_sum = math.fsum(terms)
    return h_sum - 0.5 * (j_xa.cond_entropy() + j_yb.cond_entropy())


def cond_ruzsa_to_plain(j_yb: JointDistribution, p: DenseDistribution) -> float:
    """d(Y|B, X) with X unconditioned: average H(Y+X | B=b) minus the halves."""
    if j_yb.ka != p.k:
        raise ValueError("dimension mismatch")
    pb, conds = j_yb.conditionals_given_y()
    terms = [pb[ib] * entropy_bits(xor_convolve_tables(conds[ib], p.probs))
             for ib in range(pb.size) if pb[ib] > PROB_FLOOR]
    return math.fsum(terms) - 0.5 * (j_yb.cond_entropy() + p.entropy())


def bhattacharyya(j: JointDistribution) -> float:
    """Z(xi | nu) = sum_y sqrt(P(y|1) P(y|0)) for a uniform bit xi."""
    if j.ka != 1:
        raise ValueError("first component must be a single bit")
    px = j.probs.sum(axis=1)
    if abs(px[0] - 0.5) > 1e-9:
        raise ValueError(f"first marginal must be uniform, got P(0)={px[0]!r}")
    cond0 = j.probs[0] / px[0]
    cond1 = j.probs[1] / px[1]
    return float(np.sum(np.sqrt(cond0 * cond1)))


def ml_error(j: JointDistribution) -> float:
    """Expected error of guessing X from Y by its most likely value:
    E_y [1 - max_x P(x|y)]; always <= H(X|Y)."""
    return 1.0 - float(j.probs.max(axis=0).sum())
