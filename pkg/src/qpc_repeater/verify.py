"""Cross-checks between the independent oracles, run by ``qpc-repeater verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import optics_sim
from .analytics import bm_success_probability, reconstruct_p_from_pmu
from .bm_model import physical_bm, sample_bm, enumerate_exact
from .qpc_core import BELL_STATES, CodeParams

EXACT_CODES = tuple(CodeParams(n, m) for n, m in ((1, 1), (1, 4), (2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (8, 1)))
EXACT_ETAS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
IDENTITY_CODES = tuple(CodeParams(n, m) for n, m in ((2, 2), (3, 3), (5, 4), (7, 4), (10, 3)))
IDENTITY_ETAS = tuple(Fraction(x) for x in ("0.3", "0.5", "0.75", "0.9", "0.99", "1"))
MC_CODE = CodeParams(6, 5)
MC_ETAS = (0.5, 0.9)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def check_optics() -> Check:
    try:
        table = optics_sim.classify_patterns()
    except optics_sim.PatternInconsistency as exc:
        return Check("optics-vs-physical-bm", False, str(exc))
    eff = optics_sim.identification_efficiency(table)
    mismatches = [
        (idx, a, b)
        for idx in BELL_STATES
        for a, b in product((True, False), repeat=2)
        if optics_sim.outcome_for(table, idx, a, b) != physical_bm(idx, a, b)
    ]
    ok = abs(eff - 0.5) <= 1e-12 and not mismatches
    return Check("optics-vs-physical-bm", ok, f"efficiency={eff:.15f} mismatches={len(mismatches)}")


def check_exact(codes=EXACT_CODES, etas=EXACT_ETAS) -> Check:
    bad = [
        (str(c), str(e))
        for c in codes
        for e in etas
        if enumerate_exact(c, None, e) != bm_success_probability(c, e)
    ]
    return Check("enumeration-vs-closed-form", not bad, f"{len(codes) * len(etas)} cases, failures={bad}")


def check_identity(codes=IDENTITY_CODES, etas=IDENTITY_ETAS) -> Check:
    bad = [
        (str(c), str(e))
        for c in codes
        for e in etas
        if reconstruct_p_from_pmu(c, e) != bm_success_probability(c, e)
    ]
    return Check("p-equals-p-prime", not bad, f"{len(codes) * len(etas)} cases, failures={bad}")


def check_monte_carlo(trials: int, seed: int, workers: int = 1) -> Check:
    parts, ok = [], True
    for eta in MC_ETAS:
        est = sample_bm(MC_CODE, None, eta, trials, seed, workers)
        exact = bm_success_probability(MC_CODE, eta)
        sigma = math.sqrt(exact * (1 - exact) / trials)
        z = abs(est.estimate - exact) / sigma if sigma else 0.0
        ok &= z <= 3 and est.misidentified == 0
        parts.append(f"eta={eta}: z={z:.2f} wrong={est.misidentified}")
    return Check("monte-carlo-3-sigma", ok, "; ".join(parts))


def run_all(trials: int = 200_000, seed: int = 0, workers: int = 1) -> list[Check]:
    return [
        check_optics(),
        check_exact(),
        check_identity(),
        check_monte_carlo(trials, seed, workers),
    ]
