"""BSC simulation, exact bit-MAP / ML / list decoding for small RM codes,
the puncture-and-list decoding algorithm, and the error-split verifier.

All stochastic paths draw through per-chunk generators seeded by
(master seed, chunk index); results are reproducible bit for bit and do
not depend on how chunks would be spread over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, GuardError
from .f2 import BitVector
from .info import binary_entropy
from .rm import RmCode, codebook_array

BITMAP_MAX_K = 16
LIST_MAX_K = 20
EXACT_Y_MAX_N = 16
SPLIT_MAX_N = 10
CHUNK_TRIALS = 4096


@dataclass(frozen=True)
class BscChannel:
    """Binary symmetric channel flipping each bit independently w.p. delta."""

    delta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta < 0.5:
            raise ValueError(f"delta must lie in [0, 1/2), got {self.delta}")


@dataclass(frozen=True)
class DecodeOutcome:
    decoded: BitVector
    bit_errors: int | None
    list_contained_truth: bool | None
    list_size: int


def transmit(x: BitVector, ch: BscChannel, seed: int) -> BitVector:
    rng = np.random.default_rng([seed, 0])
    z = rng.random(x.len) < ch.delta
    bits = x.bits
    for j in np.flatnonzero(z):
        bits ^= 1 << int(j)
    return BitVector(x.len, bits)


@lru_cache(maxsize=32)
def _codebook(code: RmCode) -> np.ndarray:
    return codebook_array(code)


def _as_bits(v: BitVector) -> np.ndarray:
    return np.array([(v.bits >> j) & 1 for j in range(v.len)], dtype=np.uint8)


def _posteriors(cb: np.ndarray, ybits: np.ndarray, delta: float) -> np.ndarray:
    """Row of exact P(X_i = 1 | Y = y); ybits may be (n,) or (batch, n)."""
    y2 = np.atleast_2d(ybits)
    d = (y2[:, None, :] ^ cb[None, :, :]).sum(axis=2)
    ratio = delta / (1.0 - delta) if delta > 0 else 0.0
    w = np.power(ratio, d - d.min(axis=1, keepdims=True))
    post = (w @ cb) / w.sum(axis=1, keepdims=True)
    return post if ybits.ndim == 2 else post[0]


def bitmap_decode_exact(code: RmCode, y: BitVector, ch: BscChannel
                        ) -> tuple[np.ndarray, BitVector]:
    """Exact per-bit posteriors P(X_i=1|Y) by codebook enumeration, plus
    the hard decisions (threshold 1/2, tie decided as 0)."""
    if code.k > BITMAP_MAX_K:
        raise GuardError(f"bitmap decoding guarded at k <= {BITMAP_MAX_K}")
    post = _posteriors(_codebook(code), _as_bits(y), ch.delta)
    bits = 0
    for i, p in enumerate(post):
        if p > 0.5:
            bits |= 1 << i
    return post, BitVector(code.n, bits)


def ml_decode_exact(code: RmCode, y: BitVector, ch: BscChannel) -> BitVector:
    """Closest codeword in Hamming distance; ties broken by codeword index."""
    if code.k > LIST_MAX_K:
        raise GuardError(f"ML decoding guarded at k <= {LIST_MAX_K}")
    cb = _codebook(code)
    d = (cb ^ _as_bits(y)[None, :]).sum(axis=1)
    best = int(np.argmin(d))  # argmin takes the first minimum
    return BitVector(code.n, int.from_bytes(np.packbits(cb[best], bitorder="little").tobytes(),
                                            "little"))


def build_list(code: RmCode, y: BitVector, ch: BscChannel, list_size: int
               ) -> list[BitVector]:
    """The list_size most likely codewords given y, most likely first;
    ties resolved by codeword index (stable sort)."""
    if code.k > LIST_MAX_K:
        raise GuardError(f"list building guarded at k <= {LIST_MAX_K}")
    cb = _codebook(code)
    d = (cb ^ _as_bits(y)[None, :]).sum(axis=1)
    order = np.argsort(d, kind="stable")[:list_size]
    return [BitVector(code.n,
                      int.from_bytes(np.packbits(cb[i], bitorder="little").tobytes(), "little"))
            for i in order]


def puncture_gamma(delta: float, delta_prime: float) -> float:
    """gamma = 2 (delta' - delta) / (1 - 2 delta)."""
    return 2.0 * (delta_prime - delta) / (1.0 - 2.0 * delta)


def check_puncture_config(code: RmCode, delta: float, delta_prime: float) -> float:
    if not 0.0 <= delta <= delta_prime < 0.5:
        raise ConfigurationError("need 0 <= delta <= delta' < 1/2")
    rate = code.k / code.n
    if rate >= 1.0 - binary_entropy(delta_prime):
        raise ConfigurationError(
            f"rate {rate} is not below 1 - h(delta') = {1.0 - binary_entropy(delta_prime)}")
    return puncture_gamma(delta, delta_prime)


def _punctured_core(code: RmCode, yp: np.ndarray, ypp: np.ndarray,
                    s_mask: np.ndarray, list_size: int, truth: np.ndarray | None
                    ) -> DecodeOutcome:
    cb = _codebook(code)
    d = (cb ^ ypp[None, :]).sum(axis=1)
    order = np.argsort(d, kind="stable")[:list_size]
    agree = ((cb[order] == yp[None, :]) & s_mask[None, :].astype(bool)).sum(axis=1)
    best = order[int(np.argmax(agree))]  # first maximum = list order tie-break
    decoded_bits = cb[best]
    decoded = BitVector(code.n,
                        int.from_bytes(np.packbits(decoded_bits, bitorder="little").tobytes(),
                                       "little"))
    bit_errors = None
    contained = None
    if truth is not None:
        bit_errors = int((decoded_bits ^ truth).sum())
        contained = bool((((cb[order] ^ truth[None, :]).sum(axis=1)) == 0).any())
    return DecodeOutcome(decoded, bit_errors, contained, len(order))


def punctured_list_decode(code: RmCode, y_prime: BitVector, delta: float,
                          delta_prime: float, list_size: int, seed: int,
                          truth: BitVector | None = None) -> DecodeOutcome:
    """Puncture-and-list decoding: re-randomize a gamma fraction S of the
    positions, list-decode from the degraded word, then return the list
    entry agreeing with the original word on the most positions of S."""
    gamma = check_puncture_config(code, delta, delta_prime)
    rng = np.random.default_rng([seed, 0])
    yp = _as_bits(y_prime)
    s_mask = (rng.random(code.n) < gamma).astype(np.uint8)
    fresh = (rng.random(code.n) < 0.5).astype(np.uint8)
    ypp = np.where(s_mask == 1, fresh, yp).astype(np.uint8)
    tr = _as_bits(truth) if truth is not None else None
    return _punctured_core(code, yp, ypp, s_mask, list_size, tr)


# ---------------------------------------------------------------------------
# error-split verifier (two stacked BSC error patterns)


@dataclass(frozen=True)
class ErrorSplitReport:
    marginal_residual: float
    containment_residual: float
    independence_residual: float


def error_split_check(n: int, delta: float, gamma: float) -> ErrorSplitReport:
    """Exhaustively verify, for S ~ Ber(gamma)^n and T ~ Ber(delta)^n:
    (i) S xor T is Ber(delta + gamma - 2 gamma delta)^n;
    (ii) P(S >= W | S xor T = U) is the two-factor closed form;
    (iii) P(S = W | S xor T = U) is the four-factor product (conditional
    independence of the membership indicators)."""
    if n > SPLIT_MAX_N:
        raise GuardError(f"exhaustive split check guarded at n <= {SPLIT_MAX_N}")
    size = 1 << n
    pc = np.array([int(i).bit_count() for i in range(size)])
    ps = gamma ** pc * (1 - gamma) ** (n - pc)
    pt = delta ** pc * (1 - delta) ** (n - pc)
    joint_su = np.zeros((size, size))
    for s in range(size):
        for t in range(size):
            joint_su[s, s ^ t] += ps[s] * pt[t]
    pu = joint_su.sum(axis=0)

    rho = delta + gamma - 2 * gamma * delta
    marg = rho ** pc * (1 - rho) ** (n - pc)
    res_marginal = float(np.abs(pu - marg).max())

    a = gamma * (1 - delta) / (gamma * (1 - delta) + delta * (1 - gamma))
    b = gamma * delta / (gamma * delta + (1 - gamma) * (1 - delta))
    res_containment = 0.0
    res_independence = 0.0
    for u in range(size):
        cond = joint_su[:, u] / pu[u]
        for w in range(size):
            in_u = (w & u).bit_count()
            out_u = (w & ~u & (size - 1)).bit_count()
            sup = float(cond[[s for s in range(size) if s & w == w]].sum())
            form_sup = a ** in_u * b ** out_u
            res_containment = max(res_containment, abs(sup - form_sup))
            wc_in = (~w & u & (size - 1)).bit_count()
            wc_out = n - in_u - out_u - wc_in
            form_pt = form_sup * (1 - a) ** wc_in * (1 - b) ** wc_out
            res_independence = max(res_independence, abs(float(cond[w]) - form_pt))
    return ErrorSplitReport(res_marginal, res_containment, res_independence)


# ---------------------------------------------------------------------------
# Monte-Carlo experiments


def wilson_interval(errors: int, total: int, z: float = 3.0) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    phat = errors / total
    denom = 1 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class BitErrorResult:
    code: RmCode
    delta: float
    decoder: str
    trials: int
    seed: int
    bit_errors: int
    total_bits: int
    p_bit: float
    ci_lo: float
    ci_hi: float
    per_bit: tuple[int, ...]

    @property
    def stderr(self) -> float:
        p = self.p_bit
        return math.sqrt(max(p * (1 - p), 1e-300) / self.total_bits)


def exact_bit_error(code: RmCode, ch: BscChannel) -> np.ndarray:
    """Exact P_bit,i of the bit-MAP decoder for every position, by summing
    over all noisy words."""
    if code.n > EXACT_Y_MAX_N or code.k > BITMAP_MAX_K:
        raise GuardError("exact bit-error enumeration guarded at n <= 16, k <= 16")
    cb = _codebook(code)
    size = 1 << code.n
    ybits = ((np.arange(size)[:, None] >> np.arange(code.n)[None, :]) & 1).astype(np.uint8)
    d = (ybits[:, None, :] ^ cb[None, :, :]).sum(axis=2)
    w = ch.delta ** d * (1 - ch.delta) ** (code.n - d) / (1 << code.k)
    py = w.sum(axis=1)
    p1 = w @ cb
    return np.minimum(p1, py[:, None] - p1).sum(axis=0)


def bit_error_experiment(code: RmCode, delta: float, decoder_kind: str,
                         trials: int, seed: int, delta_prime: float | None = None,
                         list_size: int | None = None) -> BitErrorResult:
    """Monte-Carlo bit-error estimate with Wilson interval and per-bit
    error profile; deterministic under (seed, config)."""
    ch = BscChannel(delta)
    cb = _codebook(code)
    if decoder_kind == "punctured":
        if delta_prime is None:
            raise ConfigurationError("punctured decoding needs delta_prime")
        gamma = check_puncture_config(code, delta, delta_prime)
        lsz = list_size if list_size is not None else 1 << code.k
    elif decoder_kind in ("bitmap", "ml"):
        gamma, lsz = 0.0, 1
    else:
        raise ConfigurationError(f"unknown decoder {decoder_kind!r}")
    per_bit = np.zeros(code.n, dtype=np.int64)
    done = 0
    chunk_index = 0
    while done < trials:
        take = min(CHUNK_TRIALS, trials - done)
        rng = np.random.default_rng([seed, chunk_index])
        msgs = rng.integers(0, 2, size=(take, code.k)).astype(np.uint8)
        x = (msgs @ cb[[1 << j for j in range(code.k)]]) & 1
        z = (rng.random((take, code.n)) < delta).astype(np.uint8)
        y = x ^ z
        if decoder_kind == "bitmap":
            post = _posteriors(cb, y, delta)
            dec = (post > 0.5).astype(np.uint8)
        elif decoder_kind == "ml":
            d = (y[:, None, :] ^ cb[None, :, :]).sum(axis=2)
            dec = cb[np.argmin(d, axis=1)]
        else:
            s = (rng.random((take, code.n)) < gamma).astype(np.uint8)
            fresh = (rng.random((take, code.n)) < 0.5).astype(np.uint8)
            ypp = np.where(s == 1, fresh, y).astype(np.uint8)
            dec = np.empty_like(y)
            for t in range(take):
                out = _punctured_core(code, y[t], ypp[t], s[t], lsz, None)
                dec[t] = _as_bits(out.decoded)
        per_bit += (dec ^ x).sum(axis=0)
        done += take
        chunk_index += 1
    errors = int(per_bit.sum())
    total = trials * code.n
    lo, hi = wilson_interval(errors, total)
    return BitErrorResult(code, delta, decoder_kind, trials, seed, errors, total,
                          errors / total, lo, hi, tuple(int(c) for c in per_bit))


def list_containment_rates(code: RmCode, delta: float, list_sizes: list[int],
                           trials: int, seed: int) -> list[tuple[int, float]]:
    """Empirical probability that the transmitted codeword lands in the
    top-L likelihood list, per L."""
    ch = BscChannel(delta)
    cb = _codebook(code)
    hits = {list_size: 0 for list_size in list_sizes}
    done = 0
    chunk_index = 0
    while done < trials:
        take = min(CHUNK_TRIALS, trials - done)
        rng = np.random.default_rng([seed, chunk_index])
        idx = rng.integers(0, cb.shape[0], size=take)
        z = (rng.random((take, code.n)) < delta).astype(np.uint8)
        y = cb[idx] ^ z
        d = (y[:, None, :] ^ cb[None, :, :]).sum(axis=2)
        order = np.argsort(d, axis=1, kind="stable")
        pos = np.argmax(order == idx[:, None], axis=1)
        for list_size in list_sizes:
            hits[list_size] += int((pos < list_size).sum())
        done += take
        chunk_index += 1
    return [(list_size, hits[list_size] / trials) for list_size in list_sizes]
