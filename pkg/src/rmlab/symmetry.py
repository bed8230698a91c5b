"""Affine symmetries of RM codes and the degree-layer automorphism group.

An affine map x -> Ax + b (A invertible over F2) permutes eval vectors and
acts linearly on coef vectors; restricted to the degree-r coefficient
layer it gives the group whose only invariant subspaces are {0} and the
full layer.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, comb

from .errors import GuardError, SearchInconclusive, TheoremViolationError
from .f2 import BitMatrix, BitVector, Subspace, parity, rank
from .rm import zeta_int

INVARIANT_ENUM_MAX = 7
DEFAULT_BFS_BUDGET = 100_000


@dataclass(frozen=True)
class AffineMap:
    """x -> Ax + b on F2^m; rows[i] is the mask of row i of A, b a mask."""

    m: int
    rows: tuple[int, ...]
    b: int

    def __post_init__(self) -> None:
        if len(self.rows) != self.m or self.b >> self.m:
            raise ValueError("shape mismatch")
        if rank(BitMatrix(self.m, self.m, self.rows)) != self.m:
            raise ValueError("matrix A is singular over F2")

    @classmethod
    def from_lists(cls, a: list[list[int]], b: list[int]) -> "AffineMap":
        mat = BitMatrix.from_rows(a)
        return cls(mat.rows, mat.row_masks, sum(bit << j for j, bit in enumerate(b)))

    @classmethod
    def identity(cls, m: int) -> "AffineMap":
        return cls(m, tuple(1 << j for j in range(m)), 0)

    def apply_point(self, x: int) -> int:
        y = self.b
        for i, row in enumerate(self.rows):
            y ^= parity(row & x) << i
        return y

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """The map x -> self(inner(x))."""
        if self.m != inner.m:
            raise ValueError("mixed dimensions")
        cols = _columns(inner.rows, self.m)
        rows = []
        for row in self.rows:
            out = 0
            for j, col in enumerate(cols):
                out |= parity(row & col) << j
            rows.append(out)
        return AffineMap(self.m, tuple(rows), self.apply_point(inner.b))


def _columns(rows: tuple[int, ...], m: int) -> list[int]:
    return [sum(((rows[i] >> j) & 1) << i for i in range(m)) for j in range(m)]


def eval_permutation(f: AffineMap) -> list[int]:
    """Gather indices g with eval(P(Ax+b)) = eval(P)[g]: g[i] is the point
    index of A*point(i)+b."""
    return [f.apply_point(x) for x in range(1 << f.m)]


def transformed_monomial_eval(f: AffineMap, subset_mask: int) -> int:
    """Eval-vector bitmask of prod_{i in S} (Ax+b)_i over all points."""
    n = 1 << f.m
    out = 0
    for x in range(n):
        y = f.apply_point(x)
        if y & subset_mask == subset_mask:
            out |= 1 << x
    return out


def coef_map(f: AffineMap) -> BitMatrix:
    """Linear map on bin-weight coef vectors taking coef(P(x)) to
    coef(P(Ax+b)); block-triangular with respect to degree."""
    n = 1 << f.m
    col_masks = [zeta_int(f.m, transformed_monomial_eval(f, s)) for s in range(n)]
    rows = []
    for i in range(n):
        row = 0
        for c in range(n):
            row |= ((col_masks[c] >> i) & 1) << c
        rows.append(row)
    return BitMatrix(n, n, tuple(rows))


@lru_cache(maxsize=None)
def layer_masks(m: int, r: int) -> tuple[int, ...]:
    """Bin-weight coordinates of the degree-r layer, ascending."""
    return tuple(i for i in range(1 << m) if int(i).bit_count() == r)


@dataclass(frozen=True)
class LayerAutomorphism:
    """Invertible map on the degree-r coefficient layer, stored per-column:
    cols[c] is the image mask of the c-th layer basis vector."""

    m: int
    r: int
    cols: tuple[int, ...]

    @property
    def dim(self) -> int:
        return comb(self.m, self.r)

    def apply_mask(self, v: int) -> int:
        out = 0
        c = 0
        while v:
            if v & 1:
                out ^= self.cols[c]
            v >>= 1
            c += 1
        return out

    def apply(self, v: BitVector) -> BitVector:
        return BitVector(self.dim, self.apply_mask(v.bits))

    def apply_subspace(self, g: Subspace) -> Subspace:
        return Subspace.span(self.dim, [self.apply_mask(b) for b in g.basis])

    def compose(self, inner: "LayerAutomorphism") -> "LayerAutomorphism":
        """v -> self(inner(v))."""
        return LayerAutomorphism(self.m, self.r,
                                 tuple(self.apply_mask(c) for c in inner.cols))

    def to_matrix(self) -> BitMatrix:
        d = self.dim
        rows = []
        for i in range(d):
            rows.append(sum(((self.cols[c] >> i) & 1) << c for c in range(d)))
        return BitMatrix(d, d, tuple(rows))

    @classmethod
    def identity(cls, m: int, r: int) -> "LayerAutomorphism":
        return cls(m, r, tuple(1 << c for c in range(comb(m, r))))


def layer_restriction(f: AffineMap, r: int) -> LayerAutomorphism:
    """Restriction of the coef map to the degree-r layer (b plays no role:
    translations only shed lower-degree terms)."""
    if not 0 <= r <= f.m:
        raise ValueError("r out of range")
    positions = layer_masks(f.m, r)
    pos_index = {p: j for j, p in enumerate(positions)}
    cols = []
    for s in positions:
        full = zeta_int(f.m, transformed_monomial_eval(f, s))
        small = 0
        for p, j in pos_index.items():
            small |= ((full >> p) & 1) << j
        cols.append(small)
    auto = LayerAutomorphism(f.m, r, tuple(cols))
    if rank(auto.to_matrix()) != auto.dim:
        raise AssertionError("layer restriction must be invertible")
    return auto


def swap_map(m: int, i: int, j: int) -> AffineMap:
    rows = [1 << t for t in range(m)]
    rows[i - 1], rows[j - 1] = rows[j - 1], rows[i - 1]
    return AffineMap(m, tuple(rows), 0)


def shear_map(m: int, i: int, j: int) -> AffineMap:
    """x_i -> x_i + x_j, x_j -> x_i, all other variables fixed."""
    rows = [1 << t for t in range(m)]
    rows[i - 1] = (1 << (i - 1)) | (1 << (j - 1))
    rows[j - 1] = 1 << (i - 1)
    return AffineMap(m, tuple(rows), 0)


def sym_generators(m: int, r: int) -> list[LayerAutomorphism]:
    """Layer restrictions of the swaps T_{i,j} (i<j) and the shears
    T'_{i,j} (all ordered pairs); these generate the whole layer group."""
    if m < 2:
        raise ValueError("need m >= 2")
    gens = []
    for i, j in itertools.combinations(range(1, m + 1), 2):
        gens.append(layer_restriction(swap_map(m, i, j), r))
    for i, j in itertools.permutations(range(1, m + 1), 2):
        gens.append(layer_restriction(shear_map(m, i, j), r))
    return gens


def invariant_subspaces(m: int, r: int) -> list[Subspace]:
    """All subspaces of the degree-r layer fixed setwise by every generator
    (hence by the generated group)."""
    from .f2 import enumerate_subspaces

    d = comb(m, r)
    if d > INVARIANT_ENUM_MAX:
        raise GuardError(f"layer dimension {d} exceeds enumeration guard {INVARIANT_ENUM_MAX}")
    gens = sym_generators(m, r) if m >= 2 else []
    out = []
    for g in enumerate_subspaces(d):
        if all(pi.apply_subspace(g) == g for pi in gens):
            out.append(g)
    return out


def orbit_distance_bound(dim_g: int, layer_dim: int) -> int:
    """ceil of (2/9) * min(dim G, C(m,r) - dim G)."""
    return ceil(2 * min(dim_g, layer_dim - dim_g) / 9)


@dataclass(frozen=True)
class OrbitSearchResult:
    automorphism: LayerAutomorphism
    distance: int
    bound: int
    states_explored: int


def max_orbit_distance(g: Subspace, m: int, r: int,
                       budget: int = DEFAULT_BFS_BUDGET) -> OrbitSearchResult:
    """Breadth-first search over generator words for a pi maximizing
    dist(G, pi(G)).  Raises SearchInconclusive if the budget runs out
    before the 2/9 bound is met, and TheoremViolationError if the whole
    orbit is exhausted below the bound."""
    from .f2 import subspace_dist

    d = comb(m, r)
    if g.ambient_dim != d:
        raise ValueError(f"subspace lives in F2^{g.ambient_dim}, layer has dim {d}")
    bound = orbit_distance_bound(g.dim, d)
    gens = sym_generators(m, r)
    identity = LayerAutomorphism.identity(m, r)
    best_auto, best_dist = identity, 0
    seen = {g}
    queue = deque([(g, identity)])
    explored = 0
    while queue:
        current, word = queue.popleft()
        explored += 1
        if explored > budget:
            if best_dist >= bound:
                break
            raise SearchInconclusive(
                f"budget {budget} exhausted at distance {best_dist} < bound {bound}")
        for gen in gens:
            nxt = gen.apply_subspace(current)
            if nxt in seen:
                continue
            seen.add(nxt)
            composed = gen.compose(word)
            dist = subspace_dist(g, nxt)
            if dist > best_dist:
                best_auto, best_dist = composed, dist
            queue.append((nxt, composed))
    if best_dist < bound:
        raise TheoremViolationError(
            f"full orbit of size {len(seen)} reaches distance {best_dist} < bound {bound}")
    return OrbitSearchResult(best_auto, best_dist, bound, explored)
