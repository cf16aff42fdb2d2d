"""Few-photon Fock-space model of the physical Bell measurement apparatus.

Two polarization qubits enter the two input ports of a 50:50 beam splitter;
each output port is split by a polarizing beam splitter onto two
photon-number-resolving detectors.  Modes are ordered ``(aH, aV, bH, bV)``
with ``a``/``b`` the spatial ports, and a click pattern is the photon count
on each of the four detectors.

This module is the independent oracle for
:func:`qpc_repeater.bm_model.physical_bm`: :func:`classify_patterns` derives
the outcome table from the simulated statistics and checks it against the
expected distinguishability classes.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Iterable

import numpy as np

from .bm_model import PhysicalOutcome
from .qpc_core import BELL_STATES, BellIndex

N_MODES = 4
MAX_PHOTONS = 2
TOL = 1e-12

Occupation = tuple[int, int, int, int]
FockState = dict[Occupation, complex]
Mixture = list[tuple[float, FockState]]
ClickPattern = Occupation

H, V = 0, 1

# a -> (a + b)/sqrt2, b -> (a - b)/sqrt2, polarization untouched.
# Column j is the image of input mode j.
_S = 1 / math.sqrt(2)
SYMMETRIC_BS = np.array(
    [
        [_S, 0, _S, 0],
        [0, _S, 0, _S],
        [_S, 0, -_S, 0],
        [0, _S, 0, -_S],
    ],
    dtype=complex,
)


class PatternInconsistency(RuntimeError):
    """The simulated click statistics do not split into the expected classes."""


def mode(port: int, pol: int) -> int:
    return 2 * port + pol


def basis_states(max_photons: int = MAX_PHOTONS) -> list[Occupation]:
    """All 4-mode occupations with at most ``max_photons`` photons (15 for 2)."""
    return [occ for occ in product(range(max_photons + 1), repeat=N_MODES) if sum(occ) <= max_photons]


def norm(state: FockState) -> float:
    return math.sqrt(sum(abs(a) ** 2 for a in state.values()))


def _creation_terms(occ: Occupation) -> list[int]:
    """Occupation as the list of modes of its creation operators."""
    return [i for i, count in enumerate(occ) for _ in range(count)]


def _occupation(modes: Iterable[int]) -> Occupation:
    occ = [0] * N_MODES
    for i in modes:
        occ[i] += 1
    return tuple(occ)


def _prefactor(occ: Occupation) -> float:
    return math.sqrt(math.prod(math.factorial(c) for c in occ))


def apply_linear_optics(state: FockState, unitary: np.ndarray) -> FockState:
    """Send each creation operator ``a_j^dag`` to ``sum_i U[i, j] a_i^dag``.

    A normalized Fock state is ``prod_j (a_j^dag)^n_j / sqrt(n_j!)`` on
    vacuum; the operator product is expanded term by term and regrouped.
    """
    out: FockState = {}
    for occ, amp in state.items():
        inputs = _creation_terms(occ)
        coeff = amp / _prefactor(occ)
        for outputs in product(range(N_MODES), repeat=len(inputs)):
            weight = coeff
            for i, j in zip(outputs, inputs):
                weight *= unitary[i, j]
            new = _occupation(outputs)
            out[new] = out.get(new, 0) + weight * _prefactor(new)
    return {occ: amp for occ, amp in out.items() if abs(amp) > TOL}


def apply_beamsplitter(state: FockState, unitary: np.ndarray = SYMMETRIC_BS) -> FockState:
    return apply_linear_optics(state, unitary)


def bell_state_vector(idx: BellIndex) -> FockState:
    """Two-photon state of the Bell state ``idx``, photon A in port a, B in port b."""
    sign = -1 if idx.l else 1
    first = _occupation([mode(0, H), mode(1, idx.k)])
    second = _occupation([mode(0, V), mode(1, 1 - idx.k)])
    return {first: _S, second: sign * _S}


def detection_distribution(state: FockState | Mixture) -> dict[ClickPattern, float]:
    """Click-pattern probabilities after the beam splitter, PBSs and detectors."""
    mixture = state if isinstance(state, list) else [(1.0, state)]
    dist: dict[ClickPattern, float] = {}
    for weight, pure in mixture:
        for occ, amp in apply_beamsplitter(pure).items():
            dist[occ] = dist.get(occ, 0.0) + weight * float(abs(amp)) ** 2
    return {occ: p for occ, p in sorted(dist.items()) if p > TOL}


def lose_photons(idx: BellIndex, keep_a: bool, keep_b: bool) -> Mixture:
    """Bell state after dropping the unkept photons, as a mixture of pure states.

    Tracing out a photon leaves one branch per polarization it could have
    had; each branch carries its probability as weight.
    """
    branches: dict[tuple, FockState] = {}
    for occ, amp in bell_state_vector(idx).items():
        pol_a = 0 if occ[mode(0, H)] else 1
        pol_b = 0 if occ[mode(1, H)] else 1
        env = (None if keep_a else pol_a, None if keep_b else pol_b)
        kept = []
        if keep_a:
            kept.append(mode(0, pol_a))
        if keep_b:
            kept.append(mode(1, pol_b))
        branches.setdefault(env, {})
        branch = branches[env]
        key = _occupation(kept)
        branch[key] = branch.get(key, 0) + amp
    mixture: Mixture = []
    for branch in branches.values():
        w = norm(branch) ** 2
        if w > TOL:
            scale = 1 / math.sqrt(w)
            mixture.append((w, {occ: a * scale for occ, a in branch.items()}))
    return mixture


def lossy_distribution(idx: BellIndex, keep_a: bool, keep_b: bool) -> dict[ClickPattern, float]:
    return detection_distribution(lose_photons(idx, keep_a, keep_b))


def _same(p: dict, q: dict) -> bool:
    keys = set(p) | set(q)
    return all(abs(p.get(c, 0.0) - q.get(c, 0.0)) <= TOL for c in keys)


def classify_patterns() -> dict[ClickPattern, PhysicalOutcome]:
    """Outcome assigned to every click pattern the apparatus can produce.

    Two-click patterns seen only for ``phi_10`` or only for ``phi_11`` fully
    identify that state; patterns shared by ``phi_00`` and ``phi_01`` (whose
    statistics are identical) reveal ``k = 0`` only.  Patterns with fewer
    than two clicks come from lost photons and are erasures; this requires
    every Bell state to give the same statistics once a photon is lost.

    Raises :class:`PatternInconsistency` if the statistics do not fall into
    these classes.
    """
    lossless = {idx: detection_distribution(bell_state_vector(idx)) for idx in BELL_STATES}
    phi00, phi01 = lossless[BellIndex(0, 0)], lossless[BellIndex(0, 1)]
    if not _same(phi00, phi01):
        raise PatternInconsistency("phi_00 and phi_01 are distinguishable")

    table: dict[ClickPattern, PhysicalOutcome] = {}
    for pattern in sorted(set().union(*lossless.values())):
        owners = {idx for idx, dist in lossless.items() if pattern in dist}
        if owners == {BellIndex(1, 0)}:
            label = PhysicalOutcome.full(1, 0)
        elif owners == {BellIndex(1, 1)}:
            label = PhysicalOutcome.full(1, 1)
        elif owners == {BellIndex(0, 0), BellIndex(0, 1)}:
            label = PhysicalOutcome.k_only(0)
        else:
            raise PatternInconsistency(f"pattern {pattern} shared by {sorted(owners)}")
        table[pattern] = label

    lossless_patterns = set(table)
    for keep_a, keep_b in ((True, False), (False, True), (False, False)):
        dists = [lossy_distribution(idx, keep_a, keep_b) for idx in BELL_STATES]
        if not all(_same(dists[0], d) for d in dists[1:]):
            raise PatternInconsistency(f"lossy statistics differ (keep_a={keep_a}, keep_b={keep_b})")
        for pattern in dists[0]:
            if pattern in lossless_patterns:
                raise PatternInconsistency(f"pattern {pattern} occurs with and without loss")
            table[pattern] = PhysicalOutcome.erasure()
    return table


def identification_efficiency(table: dict[ClickPattern, PhysicalOutcome]) -> float:
    """Probability of learning both indices of a uniformly random lossless Bell state."""
    total = 0.0
    for idx in BELL_STATES:
        for pattern, p in detection_distribution(bell_state_vector(idx)).items():
            label = table[pattern]
            if label.k == idx.k and label.l == idx.l:
                total += p
    return total / len(BELL_STATES)


def outcome_for(
    table: dict[ClickPattern, PhysicalOutcome], idx: BellIndex, keep_a: bool, keep_b: bool
) -> PhysicalOutcome:
    """The single outcome label the table gives to every pattern of this input.

    Raises :class:`PatternInconsistency` when the patterns carry different labels.
    """
    labels = {table[p] for p in lossy_distribution(idx, keep_a, keep_b)}
    if len(labels) != 1:
        raise PatternInconsistency(f"{idx} keep=({keep_a},{keep_b}) gives labels {labels}")
    return labels.pop()
