from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpc_repeater.analytics import (
    bm_success_probability,
    conditional_success_probability,
    perfect_bm_success_probability,
)
from qpc_repeater.bm_model import (
    FailureReason,
    OutcomeKind,
    PhysicalOutcome,
    decode_batch,
    decode_logical,
    enumerate_exact,
    exhaustive_soundness,
    loss_tally,
    physical_bm,
    physical_codes,
    sample_bm,
)
from qpc_repeater.qpc_core import BELL_STATES, BellIndex, CapacityError, CodeParams

F = PhysicalOutcome.full
K = PhysicalOutcome.k_only
E = PhysicalOutcome.erasure()


@pytest.mark.parametrize("idx", BELL_STATES)
def test_physical_bm_semantics(idx):
    both = physical_bm(idx, True, True)
    if idx.k:
        assert both == F(1, idx.l)
    else:
        assert both == K(0)
    for a, b in ((True, False), (False, True), (False, False)):
        assert physical_bm(idx, a, b).kind is OutcomeKind.ERASURE
    assert physical_bm(idx, True, True, perfect=True) == F(idx.k, idx.l)


def test_outcome_code_roundtrip():
    outcomes = [E, K(0), K(1)] + [F(k, l) for k in (0, 1) for l in (0, 1)]
    assert [o.code for o in outcomes] == list(range(7))
    assert [PhysicalOutcome.from_code(o.code) for o in outcomes] == outcomes


def test_physical_codes_matches_scalar():
    for idx in BELL_STATES:
        for a in (True, False):
            for perfect in (False, True):
                got = physical_codes(idx.k, idx.l, a, perfect)
                assert int(got) == physical_bm(idx, a, a, perfect).code


def test_decode_all_full():
    # phi_11 on (2,2): block indices (1,0) -> k=1, block 0 fully known with l parity 1
    grid = [[F(1, 0), F(1, 1)], [K(0), K(0)]]
    res = decode_logical(grid, CodeParams(2, 2))
    assert res.success and (res.k, res.l) == (1, 1)


def test_decode_lost_block_is_k_failure():
    grid = [[F(1, 0), F(1, 1)], [E, E]]
    res = decode_logical(grid, CodeParams(2, 2))
    assert not res.success and res.failure is FailureReason.K_UNRECOVERABLE


def test_decode_no_intact_block_is_l_failure():
    grid = [[F(1, 0), E], [K(0), E]]
    res = decode_logical(grid, CodeParams(2, 2))
    assert not res.success and res.failure is FailureReason.L_UNRECOVERABLE


def test_k_failure_takes_precedence():
    grid = [[K(0), E], [E, E]]
    assert decode_logical(grid, CodeParams(2, 2)).failure is FailureReason.K_UNRECOVERABLE


def test_decode_shape_checks():
    with pytest.raises(ValueError):
        decode_logical([[E]], CodeParams(2, 1))
    with pytest.raises(ValueError):
        decode_batch(np.zeros((2, 2), dtype=np.int8))


def test_success_depends_on_k():
    code = CodeParams(1, 1)
    assert enumerate_exact(code, BellIndex(0, 0), Fraction(1)) == 0
    assert enumerate_exact(code, BellIndex(1, 0), Fraction(1)) == 1
    assert enumerate_exact(code, None, Fraction(1)) == Fraction(1, 2)


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (2, 3), (3, 2), (4, 1)])
@pytest.mark.parametrize("eta", [Fraction(1, 3), Fraction(4, 5)])
def test_per_state_closed_form(n, m, eta):
    code = CodeParams(n, m)
    for idx in BELL_STATES:
        assert enumerate_exact(code, idx, eta) == conditional_success_probability(code, eta, idx.k)


@pytest.mark.parametrize("n,m", [(1, 1), (2, 2), (3, 2), (2, 3)])
def test_perfect_variant_closed_form(n, m):
    code = CodeParams(n, m)
    for eta in (Fraction(0), Fraction(1, 2), Fraction(9, 10), Fraction(1)):
        assert enumerate_exact(code, None, eta, perfect=True) == perfect_bm_success_probability(code, eta)


def test_tally_terms_and_capacity():
    tally = loss_tally(CodeParams(2, 3), BellIndex(1, 1))
    assert tally.terms == 2 * 4**2
    assert tally.misidentified == 0
    with pytest.raises(CapacityError):
        enumerate_exact(CodeParams(17, 1), None, Fraction(1, 2))


def test_monte_carlo_deterministic_across_workers():
    code = CodeParams(3, 3)
    a = sample_bm(code, None, 0.8, 150_000, seed=7, workers=1)
    b = sample_bm(code, None, 0.8, 150_000, seed=7, workers=3)
    assert a == b
    c = sample_bm(code, None, 0.8, 150_000, seed=8)
    assert c != a


@pytest.mark.parametrize("state", [None, BellIndex(0, 1), BellIndex(1, 0)])
def test_monte_carlo_agrees_with_exact(state):
    code, eta = CodeParams(2, 3), 0.7
    est = sample_bm(code, state, eta, 200_000, seed=1)
    exact = (
        bm_success_probability(code, eta)
        if state is None
        else conditional_success_probability(code, eta, state.k)
    )
    assert abs(est.estimate - exact) <= 4 * np.sqrt(exact * (1 - exact) / est.trials)
    assert est.misidentified == 0


def test_monte_carlo_input_checks():
    with pytest.raises(ValueError):
        sample_bm(CodeParams(1, 1), None, 1.2, 10, 0)
    with pytest.raises(ValueError):
        sample_bm(CodeParams(1, 1), None, 0.5, 0, 0)


@pytest.mark.parametrize("n,m", [(1, 5), (3, 3), (4, 2), (6, 1)])
def test_exhaustive_soundness_small(n, m):
    for idx in BELL_STATES:
        for perfect in (False, True):
            assert exhaustive_soundness(CodeParams(n, m), idx, perfect).sound


@given(
    st.integers(1, 5),
    st.integers(1, 5),
    st.sampled_from(BELL_STATES),
    st.integers(0, 2**32 - 1),
)
def test_success_never_wrong(n, m, idx, seed):
    est = sample_bm(CodeParams(n, m), idx, 0.75, 2000, seed)
    assert est.misidentified == 0
