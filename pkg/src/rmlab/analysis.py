"""Exact and Monte-Carlo layer entropies of the transformed noise W = G*Z,
plus every identity check built on them (balance equation, entropy
doubling, the 140x gap bound, permutation invariance) and the
deterministic recurrence-bound propagation.

Exact computation enumerates z in F2^n, pushes Ber(delta)^n forward
through the full transform (a bijection) and buckets the mass by layer
keys; no 2^n x 2^n objects are ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GuardError, TheoremViolationError
from .f2 import Subspace
from .info import (DenseDistribution, JointDistribution, PROB_FLOOR,
                   binary_entropy, cond_ruzsa_to_plain, entropy_bits)
from .rm import binom_leq, monomial_order, sets_below, subset_mask
from .symmetry import AffineMap, layer_masks, layer_restriction

EXACT_MAX_M = 4
PAIR_MAX_M = 3
PER_SET_MAX_M = 3
MC_MAX_M = 14
MC_MIN_SAMPLES = 1000


@dataclass(frozen=True)
class NoiseModel:
    """Bernoulli(delta)^n channel noise, 0 <= delta < 1/2."""

    delta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta < 0.5:
            raise ValueError(f"delta must lie in [0, 1/2), got {self.delta}")

    @property
    def h(self) -> float:
        return binary_entropy(self.delta)


@lru_cache(maxsize=None)
def _popcounts(nbits: int) -> np.ndarray:
    return np.array([int(i).bit_count() for i in range(1 << nbits)], dtype=np.int64)


def _zeta_ints(m: int, values: np.ndarray) -> np.ndarray:
    """Vectorized subset-parity butterfly on packed n-bit ints."""
    n = 1 << m
    w = values.astype(np.int64).copy()
    for k in range(m):
        mask = 0
        for i in range(n):
            if not (i >> k) & 1:
                mask |= 1 << i
        w ^= (w & mask) << (1 << k)
    return w


def _bits_at(values: np.ndarray, positions: tuple[int, ...]) -> np.ndarray:
    out = np.zeros_like(values)
    for j, p in enumerate(positions):
        out |= ((values >> p) & 1) << j
    return out


def tail_positions(m: int, r: int) -> tuple[int, ...]:
    """Bin-weight coordinates of the layers with degree > r."""
    return tuple(i for i in range(1 << m) if int(i).bit_count() > r)


@dataclass(frozen=True)
class LayeredNoiseJoint:
    """Exact distribution of W = G*Z indexed by the packed value of W in
    bin-weight coordinate order."""

    m: int
    delta: float
    probs: np.ndarray

    @property
    def n(self) -> int:
        return 1 << self.m

    def layer_table(self, r: int) -> np.ndarray:
        """(tail, layer) mass table: rows are W_{>r} values, columns W_r values."""
        tail = tail_positions(self.m, r)
        layer = layer_masks(self.m, r)
        idx = np.arange(1 << self.n, dtype=np.int64)
        key = (_bits_at(idx, tail) << len(layer)) | _bits_at(idx, layer)
        flat = np.bincount(key, weights=self.probs, minlength=1 << (len(tail) + len(layer)))
        return flat.reshape(1 << len(tail), 1 << len(layer))

    def tail_entropy(self, r: int) -> float:
        """H(W_{>= r})."""
        pos = tail_positions(self.m, r - 1)
        idx = np.arange(1 << self.n, dtype=np.int64)
        key = _bits_at(idx, pos)
        return entropy_bits(np.bincount(key, weights=self.probs, minlength=1 << len(pos)))


def noise_layer_joint(m: int, delta: float) -> LayeredNoiseJoint:
    delta = NoiseModel(delta).delta
    if m > EXACT_MAX_M:
        raise GuardError(
            f"exact pushforward enumerates 2^(2^m) states; guarded at m <= {EXACT_MAX_M}")
    n = 1 << m
    z = np.arange(1 << n, dtype=np.int64)
    w = _zeta_ints(m, z)
    pc = _popcounts(n)
    pz = delta ** pc * (1.0 - delta) ** (n - pc)
    probs = np.zeros(1 << n)
    probs[w] = pz
    return LayeredNoiseJoint(m, delta, probs)


@dataclass(frozen=True)
class EntropyProfile:
    """f_{m,r} = H(W_r | W_{>r}), a_{m,r} = sum_{i<=r} f_{m,i}, and the
    per-monomial averages f_{m,r}/C(m,r)."""

    m: int
    delta: float
    f: tuple[float, ...]
    a: tuple[float, ...]
    favg: tuple[float, ...]

    @property
    def total(self) -> float:
        return self.a[self.m]


def layer_entropies(m: int, delta: float, joint: LayeredNoiseJoint | None = None) -> EntropyProfile:
    if joint is None:
        joint = noise_layer_joint(m, delta)
    tails = [joint.tail_entropy(r) for r in range(m + 2)]  # tails[r] = H(W_{>=r})
    f = tuple(tails[r] - tails[r + 1] for r in range(m + 1))
    a = tuple(tails[0] - tails[r + 1] for r in range(m + 1))
    favg = tuple(f[r] / math.comb(m, r) for r in range(m + 1))
    return EntropyProfile(m, delta, f, a, favg)


def _wht(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    h = 1
    out = a.copy()
    while h < n:
        out = out.reshape(out.shape[:-1] + (n // (2 * h), 2, h))
        lo = out[..., 0, :] + out[..., 1, :]
        hi = out[..., 0, :] - out[..., 1, :]
        out = np.stack([lo, hi], axis=-2).reshape(out.shape[:-3] + (n,))
        h *= 2
    return out


def sum_layer_entropy(m: int, r: int, delta: float, *, allow_slow: bool = False,
                      joint: LayeredNoiseJoint | None = None) -> float:
    """H(W_r + W'_r | W_{>r}, W'_{>r}) for two independent noise copies,
    via per-tail-pair XOR convolution of the layer conditionals."""
    if m > PAIR_MAX_M and not allow_slow:
        raise GuardError(f"pair quantities guarded at m <= {PAIR_MAX_M}; "
                         "pass allow_slow=True to override")
    if joint is None:
        joint = noise_layer_joint(m, delta)
    tab = joint.layer_table(r)
    pt = tab.sum(axis=1)
    nz = np.flatnonzero(pt > PROB_FLOOR)
    cond = tab[nz] / pt[nz, None]
    weights = pt[nz]
    spectra = _wht(cond)
    size = cond.shape[1]
    total_terms = []
    chunk = max(1, (1 << 22) // (spectra.shape[0] * size + 1))
    for lo in range(0, spectra.shape[0], chunk):
        block = spectra[lo:lo + chunk]
        conv = _wht(block[:, None, :] * spectra[None, :, :]) / size
        conv = np.maximum(conv, 0.0)
        logs = np.where(conv > PROB_FLOOR, np.log2(conv, where=conv > PROB_FLOOR), 0.0)
        ent = -(conv * logs).sum(axis=-1)
        total_terms.append(float(np.sum(weights[lo:lo + chunk, None] * weights[None, :] * ent)))
    return math.fsum(total_terms)


def entropy_doubling(m: int, r: int, delta: float, *, allow_slow: bool = False) -> float:
    """d(W_r|W_{>r}; W_r|W_{>r}) = H(W_r + W'_r | W_{>r}, W'_{>r}) - H(W_r | W_{>r})."""
    joint = noise_layer_joint(m, delta)
    prof = layer_entropies(m, delta, joint)
    return sum_layer_entropy(m, r, delta, allow_slow=allow_slow, joint=joint) - prof.f[r]


@dataclass(frozen=True)
class BalanceReport:
    lhs: float
    rhs: float
    residual: float


def balance_check(m: int, r: int, delta: float) -> BalanceReport:
    """a_{m+1,r} computed directly versus through the balance identity
    2 a_{m,r} - H(W_r + W'_r | W_{>r}, W'_{>r})."""
    if m > PAIR_MAX_M:
        raise GuardError(f"balance check guarded at m <= {PAIR_MAX_M}")
    if not 0 <= r <= m:
        raise ValueError("need 0 <= r <= m")
    lhs = layer_entropies(m + 1, delta).a[r]
    joint = noise_layer_joint(m, delta)
    rhs = 2.0 * layer_entropies(m, delta, joint).a[r] \
        - sum_layer_entropy(m, r, delta, joint=joint)
    return BalanceReport(lhs, rhs, abs(lhs - rhs))


@dataclass(frozen=True)
class GapReport:
    gap: float
    doubling: float
    ratio: float


def fr_gap_check(m: int, r: int, delta: float, tol: float = 1e-9) -> GapReport:
    """min(f_{m,r}, C(m,r) - f_{m,r}) <= 140 * doubling; a violation would
    contradict the subspace-distance chain and stops the build."""
    prof = layer_entropies(m, delta)
    doubling = entropy_doubling(m, r, delta)
    gap = min(prof.f[r], math.comb(m, r) - prof.f[r])
    bound = 140.0 * doubling
    if gap > bound + tol:
        raise TheoremViolationError(
            f"gap {gap} exceeds 140*doubling {bound} at (m={m}, r={r}, delta={delta})")
    ratio = gap / bound if bound > 0 else 0.0
    return GapReport(gap, doubling, ratio)


def joint_layer_distribution(m: int, r: int, delta: float) -> JointDistribution:
    """(W_r, W_{>r}) as a generic joint table (X = layer, Y = tail)."""
    joint = noise_layer_joint(m, delta)
    tab = joint.layer_table(r)
    ka = math.comb(m, r)
    kb = (1 << m) - binom_leq(m, r)
    return JointDistribution(ka, kb, tab.T.copy())


def dist_to_subspace(m: int, r: int, delta: float, g: Subspace,
                     layer_joint: JointDistribution | None = None) -> float:
    """d(U_G; W_r | W_{>r})."""
    if layer_joint is None:
        layer_joint = joint_layer_distribution(m, r, delta)
    return cond_ruzsa_to_plain(layer_joint, DenseDistribution.subspace_uniform(g))


def perm_invariance_check(m: int, r: int, delta: float, g: Subspace, f: AffineMap,
                          layer_joint: JointDistribution | None = None) -> float:
    """|d(U_G; W_r|W_{>r}) - d(U_{pi(G)}; W_r|W_{>r})| for pi the layer
    restriction of the affine map; exactly zero in theory."""
    if m > PER_SET_MAX_M:
        raise GuardError(f"guarded at m <= {PER_SET_MAX_M}")
    if layer_joint is None:
        layer_joint = joint_layer_distribution(m, r, delta)
    pi = layer_restriction(f, r)
    d1 = dist_to_subspace(m, r, delta, g, layer_joint)
    d2 = dist_to_subspace(m, r, delta, pi.apply_subspace(g), layer_joint)
    return abs(d1 - d2)


# ---------------------------------------------------------------------------
# successive per-set entropies from the full (U, Z) enumeration


def _uz_grid(m: int, delta: float):
    n = 1 << m
    vals = np.arange(1 << n, dtype=np.int64)
    x_of_u = _zeta_ints(m, vals)
    pc = _popcounts(n)
    pz = delta ** pc * (1.0 - delta) ** (n - pc)
    u = np.repeat(vals, 1 << n)
    z = np.tile(vals, 1 << n)
    y = x_of_u[u] ^ z
    p = pz[z] / float(1 << n)
    return u, y, p


def per_set_profile(m: int, delta: float) -> dict[tuple[int, ...], tuple[float, float]]:
    """f_A and Z_A for every subset A of [m], conditioning on Y and every
    U_B with B below A in the total order."""
    delta = NoiseModel(delta).delta
    if m > PER_SET_MAX_M:
        raise GuardError(f"per-set enumeration guarded at m <= {PER_SET_MAX_M}")
    n = 1 << m
    u, y, p = _uz_grid(m, delta)
    out: dict[tuple[int, ...], tuple[float, float]] = {}
    for a in monomial_order(m):
        below = tuple(subset_mask(b) for b in sets_below(a, m))
        cond = (y.astype(np.int64) << len(below)) | _bits_at(u, below)
        bit = (u >> subset_mask(a)) & 1
        width = n + len(below)
        joint_key = (cond << 1) | bit
        joint_tab = np.bincount(joint_key, weights=p, minlength=1 << (width + 1))
        cond_tab = joint_tab.reshape(-1, 2).sum(axis=1)
        f_a = entropy_bits(joint_tab) - entropy_bits(cond_tab)
        pairs = joint_tab.reshape(-1, 2)
        z_a = 2.0 * float(np.sum(np.sqrt(pairs[:, 0] * pairs[:, 1])))
        out[a] = (f_a, z_a)
    return out


def per_set_entropy(m: int, a: tuple[int, ...], delta: float) -> float:
    return per_set_profile(m, delta)[tuple(sorted(a))][0]


def per_set_bhattacharyya(m: int, a: tuple[int, ...], delta: float) -> float:
    return per_set_profile(m, delta)[tuple(sorted(a))][1]


@dataclass(frozen=True)
class SimpEqReport:
    direct: float
    via_w: float
    residual: float


def simp_eq_check(m: int, r: int, delta: float) -> SimpEqReport:
    """H(U_r | Y, U_{>r}) from the full (U, Z) enumeration against
    H(W_r | W_{>r}) from the noise pushforward."""
    delta = NoiseModel(delta).delta
    if m > PER_SET_MAX_M:
        raise GuardError(f"guarded at m <= {PER_SET_MAX_M}")
    n = 1 << m
    u, y, p = _uz_grid(m, delta)
    layer = layer_masks(m, r)
    tail = tail_positions(m, r)
    cond = (y.astype(np.int64) << len(tail)) | _bits_at(u, tail)
    joint_key = (cond << len(layer)) | _bits_at(u, layer)
    joint_tab = np.bincount(joint_key, weights=p,
                            minlength=1 << (n + len(tail) + len(layer)))
    cond_tab = joint_tab.reshape(-1, 1 << len(layer)).sum(axis=1)
    direct = entropy_bits(joint_tab) - entropy_bits(cond_tab)
    via_w = layer_entropies(m, delta).f[r]
    return SimpEqReport(direct, via_w, abs(direct - via_w))


# ---------------------------------------------------------------------------
# recurrence-bound propagation


def r_star(m: int, epsilon: float, delta: float) -> int:
    """min { r : C(m,<=r)/2^m >= 1 - H(delta)/(1-epsilon) }."""
    target = 1.0 - binary_entropy(delta) / (1.0 - epsilon)
    for r in range(m + 1):
        if binom_leq(m, r) / float(1 << m) >= target:
            return r
    return m


@dataclass(frozen=True)
class RecurrenceRow:
    m: int
    r: int
    bound: float
    per_dim: float      # bound / C(m, <= r)
    per_block: float    # bound / 2^m


@dataclass(frozen=True)
class RecurrenceTable:
    epsilon: float
    delta: float
    rows: tuple[RecurrenceRow, ...]

    def per_dim_series(self) -> list[tuple[int, float]]:
        return [(row.m, row.per_dim) for row in self.rows]


def recurrence_propagate(epsilon: float, delta: float, m_max: int,
                         rate_profile: str = "capacity",
                         m_base: int = EXACT_MAX_M) -> RecurrenceTable:
    """Propagate upper bounds on a_{m,r} with the strong inequality
    (1 -+ eps/140 mix) for r <= r*(m, eps) and the weak additive one
    elsewhere, capped by the trivial bounds; read out along the requested
    rate profile."""
    if rate_profile != "capacity":
        raise ValueError(f"unknown rate profile {rate_profile!r}")
    if m_max < m_base:
        raise ValueError("m_max below the exact base")
    h = binary_entropy(delta)
    q = epsilon / 140.0
    base = layer_entropies(m_base, delta)
    bounds: dict[int, list[float]] = {m_base: list(base.a)}
    for m in range(m_base, m_max):
        prev = bounds[m]

        def get(r: int) -> float:
            if r < 0:
                return 0.0
            return prev[min(r, m)]

        rs = r_star(m, epsilon, delta)
        row = []
        for r in range(m + 2):
            if r <= rs:
                val = (1.0 - q) * get(r) + (1.0 + q) * get(r - 1)
            else:
                val = get(r) + get(r - 1)
            cap = min((1 << (m + 1)) * h, float(binom_leq(m + 1, r)))
            row.append(min(val, cap))
        bounds[m + 1] = row
    rows = []
    for m in range(m_base, m_max + 1):
        r = r_star(m, epsilon, delta)
        val = bounds[m][min(r, len(bounds[m]) - 1)]
        rows.append(RecurrenceRow(m, r, val, val / binom_leq(m, r), val / float(1 << m)))
    return RecurrenceTable(epsilon, delta, tuple(rows))


def sqrt_m_slope(series: list[tuple[int, float]]) -> float:
    """Least-squares slope of log2(value) against sqrt(m)."""
    xs = np.array([math.sqrt(m) for m, v in series if v > 0])
    ys = np.array([math.log2(v) for _, v in series if v > 0])
    return float(np.polyfit(xs, ys, 1)[0])


# ---------------------------------------------------------------------------
# Monte-Carlo extension


def _mc_chunk_size(n: int) -> int:
    return max(256, (1 << 22) // n)


def mc_layer_entropy(m: int, r: int, delta: float, samples: int,
                     seed: int) -> tuple[float, float]:
    """Plug-in estimate of H(W_r | W_{>r}) from sampled noise, with a
    delta-method standard error.  Chunk seeds derive from (seed, chunk),
    so the result does not depend on how chunks are distributed across
    workers."""
    delta = NoiseModel(delta).delta
    if m > MC_MAX_M:
        raise GuardError(f"MC guarded at m <= {MC_MAX_M}")
    if samples < MC_MIN_SAMPLES:
        raise GuardError(f"need at least {MC_MIN_SAMPLES} samples")
    n = 1 << m
    layer = np.array(layer_masks(m, r))
    tail = np.array(tail_positions(m, r), dtype=np.int64)
    stages = [(np.array([i for i in range(n) if (i >> k) & 1]),
               np.array([i for i in range(n) if not (i >> k) & 1]))
              for k in range(m)]
    chunk = _mc_chunk_size(n)
    joint_ids: dict[bytes, int] = {}
    tail_ids: dict[bytes, int] = {}
    js: list[np.ndarray] = []
    ts: list[np.ndarray] = []
    drawn = 0
    ci = 0
    while drawn < samples:
        take = min(chunk, samples - drawn)
        rng = np.random.default_rng([seed, ci])
        w = (rng.random((take, n)) < delta).astype(np.uint8)
        for hi, lo in stages:
            w[:, hi] ^= w[:, lo]
        jbytes = np.packbits(w[:, np.concatenate([tail, layer])], axis=1)
        tbytes = np.packbits(w[:, tail], axis=1) if tail.size else np.zeros((take, 1), np.uint8)
        for rows, ids, store in ((jbytes, joint_ids, js), (tbytes, tail_ids, ts)):
            uniq, inv = np.unique(rows, axis=0, return_inverse=True)
            local = np.empty(len(uniq), dtype=np.int64)
            for i, row in enumerate(uniq):
                key = row.tobytes()
                if key not in ids:
                    ids[key] = len(ids)
                local[i] = ids[key]
            store.append(local[inv.ravel()])
        drawn += take
        ci += 1
    jid = np.concatenate(js)
    tid = np.concatenate(ts)
    nsamp = float(samples)
    cj = np.bincount(jid, minlength=len(joint_ids))
    ct = np.bincount(tid, minlength=len(tail_ids))
    info = -np.log2(cj[jid] / nsamp) + np.log2(ct[tid] / nsamp)
    est = float(info.mean())
    stderr = float(info.std(ddof=1) / math.sqrt(nsamp)) if samples > 1 else 0.0
    return est, stderr
