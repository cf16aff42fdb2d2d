import math

import pytest
from hypothesis import given, strategies as st

from qpc_repeater import channel_chain as cc
from qpc_repeater.analytics import bm_success_probability, perfect_bm_success_probability
from qpc_repeater.qpc_core import CodeParams

C235 = CodeParams(23, 5)


def cfg(L=1000.0, L0=2.0, **kw):
    return cc.ChainConfig(L, L0, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(L=-1)
    with pytest.raises(ValueError):
        cfg(L=10, L0=11)
    with pytest.raises(ValueError):
        cfg(eta_source=1.2)
    with pytest.raises(ValueError):
        cfg(attenuation_length_km=0)


def test_effective_eta_values():
    assert cc.effective_eta(cfg(L0=0)) == 1
    assert cc.effective_eta(cfg(L0=2.09, eta_missing=0.97)) == pytest.approx(0.9409 * math.exp(-0.095), rel=1e-12)
    assert cc.effective_eta(cfg(L0=2.09, eta_missing=0.97)) == pytest.approx(0.8557, abs=1e-4)


@given(st.floats(0, 20), st.floats(0, 20))
def test_effective_eta_composes(a, b):
    whole = cc.effective_eta(cfg(L=100, L0=a + b))
    assert whole == pytest.approx(cc.effective_eta(cfg(L=100, L0=a)) * cc.effective_eta(cfg(L=100, L0=b)), rel=1e-12)


def test_chain_success_examples():
    assert cc.chain_success(C235, cfg(L0=2.357)) == pytest.approx(0.7762, abs=5e-5)
    # single hop, near-lossless
    code = CodeParams(4, 1)
    one = cc.chain_success(code, cfg(L=1e-9, L0=1e-9))
    assert one == pytest.approx(1 - 2**-4, abs=1e-9)


def test_real_exponent():
    c = cfg(L=10, L0=3)
    hop = bm_success_probability(C235, cc.effective_eta(c))
    assert cc.chain_success(C235, c) == pytest.approx(hop ** (10 / 3), rel=1e-12)


def test_zero_spacing_rejected_by_chain():
    with pytest.raises(ValueError):
        cc.chain_success(C235, cfg(L0=0))


def test_cost_examples():
    c = cfg(L=100, L0=1)
    p = bm_success_probability(CodeParams(2, 2), math.exp(-1 / 22))
    assert cc.cost(CodeParams(2, 2), c) == pytest.approx(4 / (p**100 * 1), rel=1e-10)
    one = CodeParams(1, 1)
    assert cc.cost(one, cfg(L=10, L0=2)) == pytest.approx(1 / (cc.chain_success(one, cfg(L=10, L0=2)) * 2))


def test_cost_degenerate():
    with pytest.raises(cc.DegenerateChain):
        cc.cost(C235, cfg(eta_source=0))


@given(st.floats(10, 2000), st.floats(10, 2000))
def test_monotone_in_distance(a, b):
    lo, hi = sorted((a, b))
    assert cc.chain_success(C235, cfg(L=hi)) <= cc.chain_success(C235, cfg(L=lo))


@given(st.floats(0.5, 1), st.floats(0.5, 1))
def test_monotone_in_efficiencies(a, b):
    lo, hi = sorted((a, b))
    assert cc.chain_success(C235, cfg(eta_missing=lo)) <= cc.chain_success(C235, cfg(eta_missing=hi))
    assert cc.chain_success(C235, cfg(eta_source=lo)) <= cc.chain_success(C235, cfg(eta_source=hi))


def test_golden_section_quadratic():
    x, fx = cc.golden_section_minimize(lambda t: (t - 1.234) ** 2, 0, 3, 1e-7)
    assert x == pytest.approx(1.234, abs=1e-6)


def test_optimize_single_hop_matches_brute_force():
    L = 2.0
    res = cc.optimize(L, (1, 3), (1, 1), (L, L))
    costs = {n: cc.cost(CodeParams(n, 1), cfg(L=L, L0=L)) for n in (1, 2, 3)}
    best = min(costs, key=costs.get)
    assert res.best.code == CodeParams(best, 1)
    assert res.best.cost == pytest.approx(costs[best])


def test_optimize_ranked_and_deterministic():
    a = cc.optimize(300, (1, 10), (1, 4), workers=1)
    b = cc.optimize(300, (1, 10), (1, 4), workers=4)
    assert a.ranked == b.ranked
    costs = [r.cost for r in a.ranked]
    assert costs == sorted(costs)
    assert len(a.ranked) == 40


def test_optimize_errors():
    with pytest.raises(ValueError):
        cc.optimize(100, (3, 2), (1, 1))
    with pytest.raises(ValueError):
        cc.optimize(100, (1, 2), (1, 1), (0, 5))
    with pytest.raises(cc.DegenerateChain):
        cc.optimize(100, (1, 2), (1, 2), eta_source=0)


def test_optimize_flags_boundary():
    res = cc.optimize(100, (1, 2), (1, 2), (0.5, 0.6))
    assert res.best.at_boundary


def test_rate_curve():
    assert cc.rate_curve([], 1000, [1, 2]) == []
    pts = cc.rate_curve([CodeParams(10, 3), C235], 1000, [2.36])
    assert pts[0].success_per_timestep < pts[1].success_per_timestep
    for pt in cc.rate_curve([C235], 1000, [1, 2, 2.36, 3, 5]):
        eta = math.exp(-pt.spacing_km / 22)
        assert pt.success_per_timestep == pytest.approx(
            bm_success_probability(C235, eta) ** (1000 / pt.spacing_km), rel=1e-9
        )


def test_threshold_inverts_chain_success():
    for L, L0, code, target in ((1000, 2, CodeParams(37, 6), 0.5), (100, 2, C235, 0.5)):
        vac = cc.source_vacuum_threshold(L, L0, code, target)
        back = cc.chain_success(code, cfg(L=L, L0=L0, eta_source=1 - vac))
        assert back == pytest.approx(target, abs=1e-9)


def test_threshold_against_bisection():
    L, L0, target = 100, 2, 0.5
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if cc.chain_success(C235, cfg(L=L, L0=L0, eta_source=mid)) < target:
            lo = mid
        else:
            hi = mid
    assert cc.source_vacuum_threshold(L, L0, C235, target) == pytest.approx(1 - hi, abs=1e-12)


def test_threshold_edges():
    best = cc.chain_success(C235, cfg())
    assert cc.source_vacuum_threshold(1000, 2, C235, best) == pytest.approx(0, abs=1e-12)
    with pytest.raises(cc.DegenerateChain):
        cc.source_vacuum_threshold(1000, 2, CodeParams(1, 1), 0.5)


def test_resources():
    assert cc.resource_count(C235).dopplers == 229
    assert round(cc.resource_count(C235, 10, 0.5).multiplexed_source_success, 4) == 0.9990
    assert cc.resource_count(C235, 1, 0.5).multiplexed_source_success == 0.5
    with pytest.raises(ValueError):
        cc.resource_count(C235, 0, 0.5)


def test_cost_ratio_single_pair():
    r = cc.perfect_bm_cost_ratio(100, (1, 1), (1, 1), (0.5, 10))
    one = CodeParams(1, 1)
    std = cc.cost(one, cfg(L=100, L0=r.standard.spacing_km))
    perf = cc.cost(one, cfg(L=100, L0=r.perfect.spacing_km), perfect=True)
    assert r.ratio == pytest.approx(std / perf, rel=1e-12)
    # p = eta/2 versus p = eta at the same spacing differs by 2**(L/L0)
    assert r.ratio > 1
    assert perfect_bm_success_probability(one, 0.8) == pytest.approx(2 * bm_success_probability(one, 0.8))
