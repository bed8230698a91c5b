"""Bit-packed linear algebra over F2.

Vectors are Python ints used as bitmasks (bit j = coordinate j, 0-based
internally; the paper-facing modules speak of coordinates 1..n).  Matrices
store one int per row.  Subspaces keep their basis in reduced row-echelon
form with pivots ascending, so equal subspaces compare equal bit for bit
and can be used as dict keys.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import GuardError

SUBSPACE_ENUM_MAX_DIM = 7


def parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class BitVector:
    """Element of F2^len; addition is coordinatewise XOR."""

    len: int
    bits: int

    def __post_init__(self) -> None:
        if self.len < 0 or self.bits < 0 or self.bits >> self.len:
            raise ValueError(f"bits 0x{self.bits:x} do not fit in {self.len} coordinates")

    @classmethod
    def from_bits(cls, coords: Iterable[int]) -> "BitVector":
        coords = list(coords)
        bits = 0
        for j, c in enumerate(coords):
            if c not in (0, 1):
                raise ValueError("coordinates must be 0/1")
            bits |= c << j
        return cls(len(coords), bits)

    @classmethod
    def zero(cls, n: int) -> "BitVector":
        return cls(n, 0)

    def bit(self, j: int) -> int:
        if not 0 <= j < self.len:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def weight(self) -> int:
        return self.bits.bit_count()

    def dot(self, other: "BitVector") -> int:
        self._check_len(other)
        return parity(self.bits & other.bits)

    def to_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> j) & 1 for j in range(self.len))

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check_len(other)
        return BitVector(self.len, self.bits ^ other.bits)

    __add__ = __xor__

    def _check_len(self, other: "BitVector") -> None:
        if self.len != other.len:
            raise ValueError(f"length mismatch: {self.len} vs {other.len}")

    def __str__(self) -> str:
        return "".join(str((self.bits >> j) & 1) for j in range(self.len))


@dataclass(frozen=True)
class BitMatrix:
    """Matrix over F2; row i is stored as the bitmask row_masks[i]."""

    rows: int
    cols: int
    row_masks: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.row_masks) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.row_masks:
            if r < 0 or r >> self.cols:
                raise ValueError("row mask wider than cols")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "BitMatrix":
        vecs = [BitVector.from_bits(r) for r in rows]
        if not vecs:
            raise ValueError("empty matrix needs explicit dimensions")
        ncols = vecs[0].len
        if any(v.len != ncols for v in vecs):
            raise ValueError("ragged rows")
        return cls(len(vecs), ncols, tuple(v.bits for v in vecs))

    @classmethod
    def from_row_masks(cls, masks: Iterable[int], cols: int) -> "BitMatrix":
        masks = tuple(masks)
        return cls(len(masks), cols, masks)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << j for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    def entry(self, i: int, j: int) -> int:
        return (self.row_masks[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.row_masks[i])

    def column_mask(self, j: int) -> int:
        mask = 0
        for i, r in enumerate(self.row_masks):
            mask |= ((r >> j) & 1) << i
        return mask

    def column(self, j: int) -> BitVector:
        return BitVector(self.rows, self.column_mask(j))

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows,
                         tuple(self.column_mask(j) for j in range(self.cols)))

    def mul_vec(self, v: BitVector) -> BitVector:
        if v.len != self.cols:
            raise ValueError(f"dimension mismatch: {self.cols} cols vs vector of length {v.len}")
        bits = 0
        for i, r in enumerate(self.row_masks):
            bits |= parity(r & v.bits) << i
        return BitVector(self.rows, bits)

    def mul_mat(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        other_cols = [other.column_mask(j) for j in range(other.cols)]
        masks = []
        for r in self.row_masks:
            out = 0
            for j, c in enumerate(other_cols):
                out |= parity(r & c) << j
            masks.append(out)
        return BitMatrix(self.rows, other.cols, tuple(masks))

    def kron(self, other: "BitMatrix") -> "BitMatrix":
        """Kronecker product; entry ((i1,i2),(j1,j2)) = self[i1,j1]*other[i2,j2]."""
        masks = []
        for r1 in self.row_masks:
            for r2 in other.row_masks:
                out = 0
                for j1 in range(self.cols):
                    if (r1 >> j1) & 1:
                        out |= r2 << (j1 * other.cols)
                masks.append(out)
        return BitMatrix(self.rows * other.rows, self.cols * other.cols, tuple(masks))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.row_masks]


def rref(matrix: BitMatrix) -> tuple[BitMatrix, int]:
    """Reduced row-echelon form and rank, pivots scanned in column order."""
    work = list(matrix.row_masks)
    nrows = len(work)
    pivot_row = 0
    for col in range(matrix.cols):
        sel = None
        for i in range(pivot_row, nrows):
            if (work[i] >> col) & 1:
                sel = i
                break
        if sel is None:
            continue
        work[pivot_row], work[sel] = work[sel], work[pivot_row]
        for i in range(nrows):
            if i != pivot_row and ((work[i] >> col) & 1):
                work[i] ^= work[pivot_row]
        pivot_row += 1
        if pivot_row == nrows:
            break
    # stable: zero rows sink to the bottom
    ordered = [w for w in work if w] + [0] * sum(1 for w in work if not w)
    return BitMatrix(matrix.rows, matrix.cols, tuple(ordered)), pivot_row


def rank(matrix: BitMatrix) -> int:
    return rref(matrix)[1]


def _rref_masks(masks: Iterable[int], cols: int) -> tuple[int, ...]:
    reduced, rk = rref(BitMatrix.from_row_masks(tuple(masks), cols))
    return reduced.row_masks[:rk]


def null_space_masks(masks: Iterable[int], cols: int) -> tuple[int, ...]:
    """Basis (as masks) of {v : row.v = 0 for every row}."""
    basis = _rref_masks(masks, cols)
    pivots = [min_bit(row) for row in basis]
    pivot_set = set(pivots)
    out = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for p, row in zip(pivots, basis):
            if (row >> free) & 1:
                v |= 1 << p
        out.append(v)
    return tuple(out)


def min_bit(x: int) -> int:
    if x == 0:
        raise ValueError("no bits set")
    return (x & -x).bit_length() - 1


@dataclass(frozen=True)
class Subspace:
    """Subspace of F2^ambient_dim with a canonical RREF basis."""

    ambient_dim: int
    basis: tuple[int, ...]

    def __post_init__(self) -> None:
        canonical = _rref_masks(self.basis, self.ambient_dim)
        if canonical != self.basis:
            raise ValueError("basis is not in canonical RREF form; use Subspace.span")

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[int | BitVector]) -> "Subspace":
        masks = [v.bits if isinstance(v, BitVector) else int(v) for v in vectors]
        for v in masks:
            if v < 0 or v >> ambient_dim:
                raise ValueError("vector outside the ambient space")
        return cls(ambient_dim, _rref_masks(masks, ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(1 << j for j in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: int | BitVector) -> bool:
        x = v.bits if isinstance(v, BitVector) else int(v)
        for row in self.basis:
            p = min_bit(row)
            if (x >> p) & 1:
                x ^= row
        return x == 0

    def elements(self) -> Iterator[int]:
        """All 2^dim elements, in combination-counter order."""
        for combo in range(1 << self.dim):
            x = 0
            c = combo
            i = 0
            while c:
                if c & 1:
                    x ^= self.basis[i]
                c >>= 1
                i += 1
            yield x

    def basis_vectors(self) -> list[BitVector]:
        return [BitVector(self.ambient_dim, b) for b in self.basis]

    def orthogonal_complement(self) -> "Subspace":
        return Subspace(self.ambient_dim, null_space_masks(self.basis, self.ambient_dim))

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(
                f"ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}")

    def __str__(self) -> str:
        rows = ",".join(format(b, f"0{self.ambient_dim}b")[::-1] for b in self.basis)
        return f"Subspace(dim={self.dim}, basis=[{rows}])"


def subspace_sum(g: Subspace, h: Subspace) -> Subspace:
    g._check_ambient(h)
    return Subspace.span(g.ambient_dim, g.basis + h.basis)


def subspace_intersect(g: Subspace, h: Subspace) -> Subspace:
    """G meet H, computed through the orthogonal complements."""
    g._check_ambient(h)
    gp = g.orthogonal_complement()
    hp = h.orthogonal_complement()
    return subspace_sum(gp, hp).orthogonal_complement()


def subspace_dist(g: Subspace, h: Subspace) -> int:
    """2 dim(G+H) - dim(G) - dim(H); always even, zero iff G = H."""
    g._check_ambient(h)
    return 2 * subspace_sum(g, h).dim - g.dim - h.dim


def enumerate_subspaces(d: int) -> list[Subspace]:
    """Every subspace of F2^d exactly once, in (dim, basis) order.

    Enumerates RREF matrices directly: pick pivot columns, then fill the
    free entries (right of the pivot, outside pivot columns) arbitrarily.
    """
    if d < 0:
        raise ValueError("negative dimension")
    if d > SUBSPACE_ENUM_MAX_DIM:
        raise GuardError(
            f"subspace enumeration is guarded at d <= {SUBSPACE_ENUM_MAX_DIM} (got {d})")
    out: list[Subspace] = [Subspace.zero(d)]
    for k in range(1, d + 1):
        for pivots in itertools.combinations(range(d), k):
            pivot_set = set(pivots)
            free_slots = [(i, j) for i, p in enumerate(pivots)
                          for j in range(p + 1, d) if j not in pivot_set]
            for fill in range(1 << len(free_slots)):
                rows = [1 << p for p in pivots]
                for s, (i, j) in enumerate(free_slots):
                    if (fill >> s) & 1:
                        rows[i] |= 1 << j
                out.append(Subspace(d, tuple(rows)))
    return out
