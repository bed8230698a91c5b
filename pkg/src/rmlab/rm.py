"""Reed-Muller codes: monomial orders, eval/coef maps, generator matrices.

Three subset orderings coexist and must not be conflated:

* degree-lex: subsets of [m] by increasing cardinality, ascending lex
  within a degree ({1,2} before {1,3}, {1,5} before {2,3}).  This is the
  column order of the generator matrices.
* bin-weight: coordinate i (0-based) of an eval/coef vector corresponds to
  the subset whose elements are the set bits of i plus one (bit j of the
  index carries variable j+1).  The full transform and all W/U layer
  bookkeeping live in this order.
* the total order used for successive conditioning, under which smaller
  sets are *greater* (the empty set is the maximum) and same-size sets
  compare by their largest differing element.

Subsets are passed around as sorted tuples of 1-based variable indices;
masks are the 0-based internal form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GuardError
from .f2 import BitMatrix, BitVector

MAX_M = 24
MIN_DIST_MAX_K = 20


def subset_mask(subset: tuple[int, ...]) -> int:
    mask = 0
    for a in subset:
        if a < 1:
            raise ValueError("variable indices are 1-based")
        mask |= 1 << (a - 1)
    return mask


def mask_subset(mask: int) -> tuple[int, ...]:
    return tuple(j + 1 for j in range(mask.bit_length()) if (mask >> j) & 1)


def binom_leq(m: int, r: int) -> int:
    """C(m, <=r) = sum_{i<=r} C(m, i)."""
    import math
    return sum(math.comb(m, i) for i in range(0, min(r, m) + 1))


@lru_cache(maxsize=None)
def monomial_order(m: int) -> tuple[tuple[int, ...], ...]:
    """All subsets of [m] in degree-lex order; position 0 is the empty set."""
    if not 0 <= m <= MAX_M:
        raise GuardError(f"m={m} outside [0, {MAX_M}]")
    out: list[tuple[int, ...]] = []
    for deg in range(m + 1):
        out.extend(itertools.combinations(range(1, m + 1), deg))
    return tuple(out)


@lru_cache(maxsize=None)
def deglex_to_bin_permutation(m: int) -> tuple[int, ...]:
    """perm[c] = bin-weight coordinate of the c-th degree-lex subset."""
    return tuple(subset_mask(a) for a in monomial_order(m))


def set_greater(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """Total order: A > B iff |A| < |B|, or same size and the descending
    element tuples compare greater at the first difference."""
    if len(a) != len(b):
        return len(a) < len(b)
    return sorted(a, reverse=True) > sorted(b, reverse=True)


def sets_below(a: tuple[int, ...], m: int) -> list[tuple[int, ...]]:
    """All B subset [m] with B < A in the total order (the conditioning set)."""
    a = tuple(sorted(a))
    return [b for b in monomial_order(m) if b != a and set_greater(a, b)]


def set_partial_order(a: tuple[int, ...], b: tuple[int, ...]) -> str:
    """Partial order: A succeeds B iff |A| <= |B| and the k-th largest
    element of A is >= the k-th largest of B for every k <= |A|."""

    def succ(x: tuple[int, ...], y: tuple[int, ...]) -> bool:
        if len(x) > len(y):
            return False
        xs = sorted(x, reverse=True)
        ys = sorted(y, reverse=True)
        return all(xs[k] >= ys[k] for k in range(len(xs)))

    if succ(a, b):
        return "succeeds"
    if succ(b, a):
        return "precedes"
    return "incomparable"


@dataclass(frozen=True)
class RmCode:
    """RM(m, r): evaluations of degree <= r polynomials in m variables."""

    m: int
    r: int

    def __post_init__(self) -> None:
        if not 0 <= self.r <= self.m:
            raise ValueError(f"need 0 <= r <= m, got r={self.r}, m={self.m}")

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def k(self) -> int:
        return binom_leq(self.m, self.r)

    @property
    def column_order(self) -> tuple[tuple[int, ...], ...]:
        return monomial_order(self.m)[: self.k]

    def __str__(self) -> str:
        return f"RM({self.m},{self.r})[n={self.n},k={self.k}]"


def eval_column_mask(m: int, subset: tuple[int, ...]) -> int:
    """Eval vector of the monomial prod_{a in subset} x_a, as a row-index mask."""
    s = subset_mask(subset)
    n = 1 << m
    mask = 0
    for i in range(n):
        if i & s == s:
            mask |= 1 << i
    return mask


def generator_matrix(m: int, r: int) -> BitMatrix:
    """n x C(m,<=r) matrix whose columns are monomial evals in degree-lex order."""
    code = RmCode(m, r)
    cols = [subset_mask(a) for a in code.column_order]
    masks = []
    for i in range(code.n):
        row = 0
        for c, s in enumerate(cols):
            if i & s == s:
                row |= 1 << c
        masks.append(row)
    return BitMatrix(code.n, code.k, tuple(masks))


def full_matrix(m: int) -> BitMatrix:
    return generator_matrix(m, m)


def kron_full_matrix(m: int) -> BitMatrix:
    """[[1,0],[1,1]]^(tensor m): the full matrix in bin-weight column order."""
    n = 1 << m
    masks = []
    for i in range(n):
        row = 0
        sub = i
        while True:  # iterate submasks of i
            row |= 1 << sub
            if sub == 0:
                break
            sub = (sub - 1) & i
        masks.append(row)
    return BitMatrix(n, n, tuple(masks))


@lru_cache(maxsize=None)
def _zeta_stage_masks(m: int) -> tuple[tuple[int, int], ...]:
    n = 1 << m
    stages = []
    for k in range(m):
        step = 1 << k
        mask = 0
        for i in range(n):
            if not (i >> k) & 1:
                mask |= 1 << i
        stages.append((mask, step))
    return tuple(stages)


def zeta_int(m: int, bits: int) -> int:
    """Subset-parity butterfly on a packed length-2^m vector: out_i = xor_{j<=i} in_j
    (<= meaning bitwise submask).  Self-inverse."""
    for mask, step in _zeta_stage_masks(m):
        bits ^= (bits & mask) << step
    return bits


def full_transform(m: int, v: BitVector) -> BitVector:
    """Multiply by the full matrix in bin-weight order; involution, swaps
    coef and eval representations."""
    if v.len != 1 << m:
        raise ValueError(f"expected length {1 << m}, got {v.len}")
    return BitVector(v.len, zeta_int(m, v.bits))


def eval_poly(m: int, coeffs: BitVector) -> BitVector:
    """Evaluate the polynomial with degree-lex coefficient vector `coeffs`
    at all points; entry i is the value at bin_m(i-1)."""
    if coeffs.len != 1 << m:
        raise ValueError(f"expected {1 << m} coefficients, got {coeffs.len}")
    perm = deglex_to_bin_permutation(m)
    bin_bits = 0
    for c, target in enumerate(perm):
        bin_bits |= ((coeffs.bits >> c) & 1) << target
    return BitVector(coeffs.len, zeta_int(m, bin_bits))


def generator_array(m: int, r: int) -> np.ndarray:
    """(k, n) uint8 array; row c is the eval vector of the c-th column monomial."""
    code = RmCode(m, r)
    arr = np.zeros((code.k, code.n), dtype=np.uint8)
    idx = np.arange(code.n)
    for c, a in enumerate(code.column_order):
        s = subset_mask(a)
        arr[c] = (idx & s) == s
    return arr


def codebook_array(code: RmCode) -> np.ndarray:
    """(2^k, n) uint8 array of all codewords; row u is the encoding of the
    message whose bits are the binary digits of u."""
    if code.k > MIN_DIST_MAX_K:
        raise GuardError(f"codebook enumeration guarded at k <= {MIN_DIST_MAX_K}")
    gen = generator_array(code.m, code.r)
    u = np.arange(1 << code.k, dtype=np.uint32)
    ubits = ((u[:, None] >> np.arange(code.k)[None, :]) & 1).astype(np.uint8)
    return (ubits @ gen) & 1


def min_distance_bruteforce(code: RmCode) -> int:
    """Minimum Hamming weight over nonzero codewords (equals 2^(m-r))."""
    cb = codebook_array(code)
    weights = cb.sum(axis=1)
    return int(weights[1:].min())
