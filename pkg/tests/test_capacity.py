import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from hetcache.capacity import capacity, capacity_arrays, load_coefficients, load_profile
from hetcache.errors import DomainError, HetCacheError
from hetcache.popularity import NO_HITS, HitRates
from hetcache.rates import UNBOUNDED, LoadCaps

CAPS = LoadCaps(80.0, 3000.0, 1200.0, 1000.0)

cap_values = st.one_of(st.floats(1e-3, 1e4), st.just(math.inf))
caps_st = st.builds(LoadCaps, st.floats(1e-3, 1e4), cap_values, st.floats(1e-3, 1e4), cap_values)


@st.composite
def hits_st(draw):
    total = draw(st.floats(0.0, 1.0))
    sbs = draw(st.floats(0.0, 1.0)) * total
    return HitRates(sbs, total - sbs)


def test_full_hit_profile():
    prof = load_profile(HitRates(0.7, 0.3), 0.4, 100.0)
    assert prof.lambda_mbh == 0 and prof.lambda_sbh == 0
    assert prof.lambda_mr == pytest.approx(30.0) and prof.lambda_sr == pytest.approx(70.0)


def test_no_cache_all_to_mbs():
    prof = load_profile(NO_HITS, 0.0, 100.0)
    assert (prof.lambda_mr, prof.lambda_mbh, prof.lambda_sr, prof.lambda_sbh) == (100, 100, 0, 0)


def test_hand_evaluated_profile():
    prof = load_profile(HitRates(0.3, 0.2), 0.5, 100.0)
    got = (prof.lambda_mr, prof.lambda_mbh, prof.lambda_sr, prof.lambda_sbh)
    assert got == pytest.approx((45.0, 25.0, 55.0, 25.0), abs=1e-12)


@pytest.mark.parametrize("phi, lam", [(-0.1, 1.0), (1.1, 1.0), (0.5, -1.0)])
def test_profile_domain(phi, lam):
    with pytest.raises(DomainError):
        load_profile(NO_HITS, phi, lam)


@given(hits_st(), st.floats(0, 1), st.floats(0, 1e4))
def test_profile_invariants(hits, phi, lam):
    prof = load_profile(hits, phi, lam)
    assert prof.lambda_mr + prof.lambda_sr == pytest.approx(lam, rel=1e-12, abs=1e-12)
    assert prof.total == pytest.approx(lam, rel=1e-12, abs=1e-12)
    assert 0 <= prof.lambda_mbh <= prof.lambda_mr + 1e-12
    assert 0 <= prof.lambda_sbh <= prof.lambda_sr + 1e-12


def test_zero_steering_unbounds_sbh():
    assert capacity(CAPS, HitRates(0.2, 0.1), 0.0).mu_sbh == UNBOUNDED


def test_no_hits_mbs_path_only():
    b = capacity(CAPS, NO_HITS, 0.0)
    assert b.mu == min(CAPS.mr, CAPS.mbh)
    assert b.bottleneck == "MR"


def test_no_cache_load_balancing_optimum():
    caps = CAPS.replace(mbh=UNBOUNDED, sbh=UNBOUNDED)
    phi = caps.sr / (caps.mr + caps.sr)
    assert capacity(caps, NO_HITS, phi).mu == pytest.approx(caps.mr + caps.sr, rel=1e-12)


def test_all_unbounded_is_error():
    with pytest.raises(HetCacheError):
        capacity(LoadCaps(math.inf, math.inf, math.inf, math.inf), HitRates(0.5, 0.1), 0.5)


def test_tie_break_order():
    caps = LoadCaps(1.0, 1.0, 1.0, 1.0)
    assert capacity(caps, NO_HITS, 0.0).bottleneck == "MR"
    # MBH alone ties with SR; MBH wins
    b = capacity(LoadCaps(2.0, 1.0, 1.0, 5.0), HitRates(0.5, 0.0), 0.0)
    assert b.mu_mbh == b.mu_sr and b.bottleneck == "MBH"


@given(caps_st, hits_st(), st.floats(0, 1))
def test_matches_direct_substitution(caps, hits, phi):
    b = capacity(caps, hits, phi)
    want = oracles.part_capacities(caps.as_dict(), hits.sbs_hit, hits.mbs_hit, phi)
    for part, value in b.as_dict().items():
        assert value == pytest.approx(want[part], rel=1e-12)
    assert b.mu == min(b.as_dict().values())
    assert b.as_dict()[b.bottleneck] == b.mu


@given(caps_st, hits_st(), st.floats(0, 1))
def test_sum_bound(caps, hits, phi):
    assert capacity(caps, hits, phi).mu <= (caps.mr + caps.sr) * (1 + 1e-12)


@given(caps_st, hits_st(), st.floats(0, 1), st.floats(1e-3, 1e3))
def test_positive_homogeneity(caps, hits, phi, c):
    scaled = LoadCaps(c * caps.mr, c * caps.mbh, c * caps.sr, c * caps.sbh)
    a, b = capacity(caps, hits, phi), capacity(scaled, hits, phi)
    assert b.mu == pytest.approx(c * a.mu, rel=1e-12)
    for x, y in zip(a.as_dict().values(), b.as_dict().values()):
        assert y == pytest.approx(c * x, rel=1e-12)


@given(caps_st, st.lists(st.tuples(hits_st(), st.floats(0, 1)), min_size=1, max_size=15))
def test_array_form_matches_scalar(caps, points):
    s = np.array([h.sbs_hit for h, _ in points])
    m = np.array([h.mbs_hit for h, _ in points])
    phi = np.array([f for _, f in points])
    arrays = capacity_arrays(caps, s, m, phi)
    for k, (h, f) in enumerate(points):
        b = capacity(caps, h, f)
        expected = (b.mu_mr, b.mu_mbh, b.mu_sr, b.mu_sbh, b.mu)
        for arr, want in zip(arrays, expected):
            assert arr[k] == pytest.approx(want, rel=1e-12)


def test_coefficients_sum_radio_to_one():
    c = load_coefficients(HitRates(0.25, 0.15), 0.3)
    assert c[0] + c[2] == pytest.approx(1.0, abs=1e-15)
