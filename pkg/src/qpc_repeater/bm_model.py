"""Physical Bell measurement under loss and logical decoding for QPC(n, m).

Physical outcomes are integer-coded so that whole batches of ``n x m``
outcome grids can be decoded with numpy:

====  ==========================
code  outcome
====  ==========================
0     erasure
1+k   only ``k`` identified
3+2k+l  both ``k`` and ``l``
====  ==========================

:func:`decode_batch` is the decoder; :func:`decode_logical` is the
object-level wrapper around it.  Two oracles sit on top: a seeded Monte Carlo
estimator (:func:`sample_bm`) and exact enumeration over every loss pattern
and decomposition term (:func:`enumerate_exact`).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .qpc_core import (
    BELL_STATES,
    BellIndex,
    CapacityError,
    CodeParams,
    expand_block_bell,
    expand_logical_bell,
    index_set,
)

ERASURE = 0
K_ONLY_BASE = 1
FULL_BASE = 3

ENUMERATION_CAPACITY = 16
MC_CHUNK = 1 << 16
_SEED_MASK = (1 << 64) - 1


class OutcomeKind(enum.Enum):
    FULL = "full"
    K_ONLY = "k_only"
    ERASURE = "erasure"


@dataclass(frozen=True)
class PhysicalOutcome:
    kind: OutcomeKind
    k: int | None = None
    l: int | None = None

    @classmethod
    def full(cls, k: int, l: int) -> "PhysicalOutcome":
        return cls(OutcomeKind.FULL, k, l)

    @classmethod
    def k_only(cls, k: int) -> "PhysicalOutcome":
        return cls(OutcomeKind.K_ONLY, k)

    @classmethod
    def erasure(cls) -> "PhysicalOutcome":
        return cls(OutcomeKind.ERASURE)

    @property
    def code(self) -> int:
        if self.kind is OutcomeKind.ERASURE:
            return ERASURE
        if self.kind is OutcomeKind.K_ONLY:
            return K_ONLY_BASE + self.k
        return FULL_BASE + 2 * self.k + self.l

    @classmethod
    def from_code(cls, code: int) -> "PhysicalOutcome":
        code = int(code)
        if code == ERASURE:
            return cls.erasure()
        if code < FULL_BASE:
            return cls.k_only(code - K_ONLY_BASE)
        k, l = divmod(code - FULL_BASE, 2)
        return cls.full(k, l)


class FailureReason(enum.Enum):
    K_UNRECOVERABLE = 1
    L_UNRECOVERABLE = 2


@dataclass(frozen=True)
class LogicalBmResult:
    success: bool
    k: int | None = None
    l: int | None = None
    failure: FailureReason | None = None

    @property
    def index(self) -> BellIndex | None:
        return BellIndex(self.k, self.l) if self.success else None


def physical_bm(
    true_state: BellIndex, photon_a_present: bool, photon_b_present: bool, perfect: bool = False
) -> PhysicalOutcome:
    """Outcome of one linear-optics Bell measurement on a photon pair.

    Only pairs with both photons give information.  Then ``k = 1`` states
    are fully identified and ``k = 0`` states reveal only ``k``.  With
    ``perfect=True`` every complete pair is fully identified (a hypothetical
    unit-efficiency physical measurement, used for cost comparisons).
    """
    if not (photon_a_present and photon_b_present):
        return PhysicalOutcome.erasure()
    if true_state.k == 1 or perfect:
        return PhysicalOutcome.full(true_state.k, true_state.l)
    return PhysicalOutcome.k_only(0)


def physical_codes(k, l, present, perfect: bool = False) -> np.ndarray:
    """Vectorized :func:`physical_bm` returning outcome codes (int8)."""
    k = np.asarray(k, dtype=np.int8)
    l = np.asarray(l, dtype=np.int8)
    present = np.asarray(present, dtype=bool)
    if perfect:
        informative = FULL_BASE + 2 * k + l
    else:
        informative = np.where(k == 1, FULL_BASE + 2 + l, K_ONLY_BASE + k)
    return np.where(present, informative, ERASURE).astype(np.int8)


class DecodedBatch(NamedTuple):
    success: np.ndarray
    k: np.ndarray
    l: np.ndarray
    reason: np.ndarray  # 0 success, else FailureReason value


# per-code lookups: first index, second index (full outcomes only)
_K_BIT = np.array([0, 0, 1, 0, 0, 1, 1], dtype=np.int8)
_L_BIT = np.array([0, 0, 0, 0, 1, 0, 1], dtype=np.int8)


def decode_columns(cols: np.ndarray) -> DecodedBatch:
    """Decode outcome grids stored column-wise, shape ``(n, m, batch)``.

    A block yields its first index when at least one pair in it was not
    erased (all such pairs agree; disagreement makes the block unusable).
    The logical ``k`` is the parity of the block indices and needs every
    block.  The logical ``l`` comes from the first block whose pairs are all
    fully identified.  ``k`` failures are reported ahead of ``l`` failures.
    """
    n, m, batch = cols.shape
    k_ok = np.ones(batch, dtype=bool)
    l_ok = np.zeros(batch, dtype=bool)
    k = np.zeros(batch, dtype=np.int8)
    l = np.zeros(batch, dtype=np.int8)
    for block in cols:
        seen = np.zeros(batch, dtype=bool)
        any_one = np.zeros(batch, dtype=bool)
        any_zero = np.zeros(batch, dtype=bool)
        intact = np.ones(batch, dtype=bool)
        l_par = np.zeros(batch, dtype=np.int8)
        for x in block:
            present = x != ERASURE
            kb = _K_BIT[x].view(bool)
            seen |= present
            any_one |= kb
            any_zero |= present & ~kb
            intact &= x >= FULL_BASE
            l_par ^= _L_BIT[x]
        k_ok &= seen & ~(any_one & any_zero)
        k ^= any_one.view(np.int8)
        fresh = intact & ~l_ok
        l[fresh] = l_par[fresh]
        l_ok |= intact
    success = k_ok & l_ok
    reason = np.where(
        success,
        0,
        np.where(k_ok, FailureReason.L_UNRECOVERABLE.value, FailureReason.K_UNRECOVERABLE.value),
    ).astype(np.int8)
    return DecodedBatch(success, k, l, reason)


def decode_batch(codes: np.ndarray) -> DecodedBatch:
    """Decode a batch of outcome grids of shape ``(batch, n, m)``."""
    codes = np.asarray(codes, dtype=np.int8)
    if codes.ndim != 3:
        raise ValueError(f"expected (batch, n, m) codes, got shape {codes.shape}")
    return decode_columns(np.ascontiguousarray(np.moveaxis(codes, 0, -1)))


def decode_logical(
    outcomes: Sequence[Sequence[PhysicalOutcome]], code: CodeParams
) -> LogicalBmResult:
    if len(outcomes) != code.n or any(len(row) != code.m for row in outcomes):
        raise ValueError(f"outcome grid does not match code {code}")
    grid = np.array([[o.code for o in row] for row in outcomes], dtype=np.int8)
    out = decode_batch(grid[None])
    if out.success[0]:
        return LogicalBmResult(True, int(out.k[0]), int(out.l[0]))
    return LogicalBmResult(False, failure=FailureReason(int(out.reason[0])))


def _check_eta(eta) -> None:
    if not 0 <= eta <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


# -- Monte Carlo -----------------------------------------------------------


@dataclass(frozen=True)
class BmEstimate:
    successes: int
    trials: int
    estimate: float
    standard_error: float
    misidentified: int = 0


def _random_parity_bits(rng: np.random.Generator, shape: tuple[int, ...], parity) -> np.ndarray:
    """Uniform bit vectors along the last axis with prescribed parity."""
    free = rng.integers(0, 2, size=shape[:-1] + (shape[-1] - 1,), dtype=np.int8)
    last = (np.asarray(parity) - free.sum(axis=-1)) & 1
    return np.concatenate([free, last[..., None].astype(np.int8)], axis=-1)


def _sample_chunk(
    code: CodeParams,
    true_state: BellIndex | None,
    eta: float,
    seed: int,
    chunk: int,
    size: int,
    perfect: bool,
) -> tuple[int, int]:
    rng = np.random.default_rng([seed & _SEED_MASK, chunk])
    n, m = code.n, code.m
    if true_state is None:
        k_true, l_true = rng.integers(0, 2, size=(2, size), dtype=np.int8)
    else:
        k_true = np.full(size, true_state.k, dtype=np.int8)
        l_true = np.full(size, true_state.l, dtype=np.int8)
    s = _random_parity_bits(rng, (size, n), k_true)
    r = _random_parity_bits(rng, (size, n, m), np.repeat(l_true[:, None], n, axis=1))
    present = rng.random((size, n, m)) >= 1.0 - eta
    codes = physical_codes(np.broadcast_to(s[:, :, None], r.shape), r, present, perfect)
    out = decode_batch(codes)
    correct = (out.k == k_true) & (out.l == l_true)
    return int((out.success & correct).sum()), int((out.success & ~correct).sum())


def sample_bm(
    code: CodeParams,
    true_state: BellIndex | None,
    eta: float,
    trials: int,
    seed: int,
    workers: int = 1,
    perfect: bool = False,
) -> BmEstimate:
    """Monte Carlo estimate of the logical Bell measurement success probability.

    With ``true_state=None`` each trial measures a uniformly random Bell
    state, which is the teleportation setting; a fixed state conditions on
    it (the success probability depends on its ``k``).

    Trials are generated in fixed chunks of ``MC_CHUNK``; chunk ``c`` draws
    from a generator seeded by ``(seed, c)``, so the result depends only on
    ``(seed, trials)`` and not on ``workers``.
    """
    _check_eta(eta)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sizes = [min(MC_CHUNK, trials - start) for start in range(0, trials, MC_CHUNK)]
    jobs = [(code, true_state, float(eta), seed, c, size, perfect) for c, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _sample_chunk(*job), jobs))
    else:
        parts = [_sample_chunk(*job) for job in jobs]
    successes = sum(p[0] for p in parts)
    wrong = sum(p[1] for p in parts)
    est = successes / trials
    return BmEstimate(successes, trials, est, math.sqrt(est * (1 - est) / trials), wrong)


# -- exact enumeration -----------------------------------------------------


class LossTally(NamedTuple):
    """Success counts over (loss pattern, decomposition term) pairs.

    ``success_by_lost[mu]`` counts pairs whose loss pattern drops ``mu``
    signal photons and which decode to the true Bell index.
    """

    success_by_lost: tuple[int, ...]
    misidentified: int
    terms: int


def decomposition_terms(code: CodeParams, true_state: BellIndex) -> tuple[np.ndarray, np.ndarray]:
    """Physical ``(k, l)`` arrays of shape ``(terms, n, m)`` for every term."""
    ks, ls = [], []
    for logical_term in expand_logical_bell(true_state, code.n):
        per_block = [expand_block_bell(b, code.m) for b in logical_term]
        for combo in product(*per_block):
            ks.append([[p.k for p in block] for block in combo])
            ls.append([[p.l for p in block] for block in combo])
    return np.array(ks, dtype=np.int8), np.array(ls, dtype=np.int8)


@lru_cache(maxsize=None)
def loss_tally(code: CodeParams, true_state: BellIndex, perfect: bool = False) -> LossTally:
    if code.size > ENUMERATION_CAPACITY:
        raise CapacityError(f"exact enumeration supports n*m <= {ENUMERATION_CAPACITY}")
    n, m, size = code.n, code.m, code.size
    k_terms, l_terms = decomposition_terms(code, true_state)
    terms = len(k_terms)
    # (n, m, 1, terms) against (n, m, patterns, 1)
    k_cols = np.moveaxis(k_terms, 0, -1)[:, :, None, :]
    l_cols = np.moveaxis(l_terms, 0, -1)[:, :, None, :]
    patterns = np.arange(1 << size, dtype=np.int64)
    lost = ((patterns[:, None] >> np.arange(size)) & 1).astype(bool)
    mu = lost.sum(axis=1)
    present_cols = np.moveaxis(~lost.reshape(-1, n, m), 0, -1)[:, :, :, None]

    counts = np.zeros(size + 1, dtype=np.int64)
    wrong = 0
    step = max(1, (1 << 20) // terms)
    for start in range(0, len(patterns), step):
        present = present_cols[:, :, start : start + step]
        cols = physical_codes(k_cols, l_cols, present, perfect).reshape(n, m, -1)
        out = decode_columns(cols)
        correct = (out.k == true_state.k) & (out.l == true_state.l)
        good = (out.success & correct).reshape(-1, terms).sum(axis=1)
        np.add.at(counts, mu[start : start + step], good)
        wrong += int((out.success & ~correct).sum())
    return LossTally(tuple(int(c) for c in counts), wrong, terms)


def enumerate_exact(
    code: CodeParams, true_state: BellIndex | None, eta, perfect: bool = False
) -> Fraction:
    """Exact success probability by brute force over every loss pattern and term.

    Each of the ``2**(n*m)`` loss patterns is weighted by
    ``eta**kept * (1 - eta)**lost``; within a pattern every decomposition
    term is equally likely.  ``true_state=None`` averages over the four Bell
    states.
    """
    eta = Fraction(eta)
    _check_eta(eta)
    states = BELL_STATES if true_state is None else (true_state,)
    size = code.size
    total = Fraction(0)
    for state in states:
        tally = loss_tally(code, state, perfect)
        hits = sum(
            c * eta ** (size - mu) * (1 - eta) ** mu
            for mu, c in enumerate(tally.success_by_lost)
        )
        total += Fraction(hits) / tally.terms
    return total / len(states)


# -- exhaustive soundness --------------------------------------------------


@dataclass(frozen=True)
class SoundnessReport:
    """Outcome of decoding every reachable outcome grid for one Bell state."""

    code: CodeParams
    true_state: BellIndex
    grids: int
    successes: int
    misidentified: int

    @property
    def sound(self) -> bool:
        return self.misidentified == 0


def _block_row_groups(m: int, s: int, true_l: int, perfect: bool):
    """Yield arrays of outcome rows one block shows for block index ``s``.

    One group per loss pattern of the block.  A missing photon erases its
    pair whatever the Bell state, so only the second indices of kept pairs
    are enumerated; lost slots just complete the parity to ``true_l``.
    """
    for lost in product((False, True), repeat=m):
        kept = [j for j, gone in enumerate(lost) if not gone]
        free = np.arange(1 << len(kept), dtype=np.int64)
        bits = ((free[:, None] >> np.arange(len(kept))) & 1).astype(np.int8)
        if len(kept) == m:
            bits = bits[bits.sum(axis=1) % 2 == true_l]
        r = np.zeros((len(bits), m), dtype=np.int8)
        r[:, kept] = bits
        if len(kept) < m:
            r[:, lost.index(True)] = (true_l - bits.sum(axis=1)) & 1
        yield physical_codes(np.full(r.shape, s, dtype=np.int8), r, ~np.array(lost), perfect)


def _block_row_table(m: int, true_l: int, perfect: bool) -> tuple[np.ndarray, np.ndarray]:
    """Distinct block rows with a ``(R, 2)`` mask of which block index produces each."""
    seen: dict[bytes, list] = {}
    for s in (0, 1):
        for group in _block_row_groups(m, s, true_l, perfect):
            for row in group:
                seen.setdefault(row.tobytes(), [row, False, False])[1 + s] = True
    keys = sorted(seen)
    rows = np.array([seen[key][0] for key in keys], dtype=np.int8)
    reach = np.array([seen[key][1:] for key in keys], dtype=bool)
    return rows, reach


def _tally(out: DecodedBatch, k_true: int, l_true: int, mask=None) -> tuple[int, int, int]:
    success = out.success if mask is None else out.success & mask
    correct = (out.k == k_true) & (out.l == l_true)
    grids = len(out.success) if mask is None else int(mask.sum())
    return grids, int((success & correct).sum()), int((success & ~correct).sum())


def _single_block_soundness(code: CodeParams, true_state: BellIndex, perfect: bool, chunk: int):
    # n = 1: the block index is k itself and every grid is a single row
    totals = np.zeros(3, dtype=np.int64)
    pending: list[np.ndarray] = []
    pending_rows = 0

    def flush():
        rows = np.concatenate(pending)
        out = decode_columns(np.ascontiguousarray(rows.T)[None])
        totals[:] += _tally(out, true_state.k, true_state.l)

    for group in _block_row_groups(code.m, true_state.k, true_state.l, perfect):
        pending.append(group)
        pending_rows += len(group)
        if pending_rows >= chunk:
            flush()
            pending, pending_rows = [], 0
    if pending:
        flush()
    return tuple(int(t) for t in totals)


@lru_cache(maxsize=None)
def _soundness_by_k(code: CodeParams, true_l: int, perfect: bool, chunk: int) -> dict[int, tuple]:
    n, m = code.n, code.m
    rows, reach = _block_row_table(m, true_l, perfect)
    cols = np.ascontiguousarray(rows.T)  # (m, R)
    radix = len(rows)
    either = reach[:, 0] & reach[:, 1]
    only1 = (reach[:, 1] & ~reach[:, 0]).astype(np.int8)
    total = radix**n
    totals = {0: np.zeros(3, dtype=np.int64), 1: np.zeros(3, dtype=np.int64)}
    for start in range(0, total, chunk):
        rest = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.empty((n, len(rest)), dtype=np.int64)
        for b in range(n):
            rest, digits[b] = np.divmod(rest, radix)
        free = either[digits].any(axis=0)
        forced = only1[digits].sum(axis=0) & 1
        out = decode_columns(cols[:, digits].transpose(1, 0, 2))
        for k in (0, 1):
            totals[k] += _tally(out, k, true_l, free | (forced == k))
    return {k: tuple(int(t) for t in v) for k, v in totals.items()}


def exhaustive_soundness(
    code: CodeParams, true_state: BellIndex, perfect: bool = False, chunk: int = 1 << 20
) -> SoundnessReport:
    """Decode every outcome grid reachable from ``true_state`` under any loss.

    The decoder only ever sees outcome grids, so checking each distinct
    reachable grid once covers every (loss pattern, decomposition term)
    configuration.  A grid is reachable when each block row is reachable and
    the block indices can be chosen with parity ``k``.
    """
    if code.size > ENUMERATION_CAPACITY:
        raise CapacityError(f"exhaustive soundness supports n*m <= {ENUMERATION_CAPACITY}")
    if code.n == 1:
        grids, ok, wrong = _single_block_soundness(code, true_state, perfect, chunk)
    else:
        grids, ok, wrong = _soundness_by_k(code, true_state.l, perfect, chunk)[true_state.k]
    return SoundnessReport(code, true_state, grids, ok, wrong)
