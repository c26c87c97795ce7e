import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextsim import band
from contextsim.band import BandShare
from contextsim.protocol import (
    CANONICAL_SETTINGS,
    PRINTED_TABLE1_X,
    SettingsQuad,
    estimate_chsh,
    estimate_curve,
    estimate_from_sums,
    reproduce_table1,
    run_adaptive_trial,
    run_nonadaptive_trial,
    table1_mean_x,
    uniform_orientation_product_analytic,
)

P, M = 1, -1


def test_canonical_settings():
    assert CANONICAL_SETTINGS == SettingsQuad(0.0, math.pi / 2, math.pi / 4, -math.pi / 4)
    with pytest.raises(ValueError):
        SettingsQuad(0.0, math.nan, 0.0, 0.0)


# --- single trials against printed rows ---------------------------------------------

@pytest.mark.parametrize("x,outcomes,products,row", [
    (-0.514823, (P, P, P, P), (P, P, P, P), 2),
    (0.920526, (P, M, M, M), (M, M, P, P), -2),
    (0.013375, (P, M, P, P), (P, P, M, M), 2),
])
def test_nonadaptive_rows(x, outcomes, products, row):
    rec = run_nonadaptive_trial(CANONICAL_SETTINGS, BandShare(0.0, x))
    assert rec.outcomes == outcomes
    assert rec.products == products
    assert rec.chsh_row == row
    assert rec.cobits == 0


@pytest.mark.parametrize("x,products,row", [
    (-0.514823, (P, P, P, M), 4),
    (-0.832267, (P, P, P, P), 2),
    (0.988427, (M, M, M, M), -2),
])
def test_adaptive_rows(x, products, row):
    rec = run_adaptive_trial(CANONICAL_SETTINGS, BandShare(0.0, x))
    assert rec.products == products
    assert rec.chsh_row == row
    assert rec.cobits == 4


@given(st.lists(st.floats(-7, 7), min_size=4, max_size=4), st.floats(-7, 7), st.floats(-1, 1))
def test_trial_invariants(angles, phi, x):
    quad = SettingsQuad(*angles)
    share = BandShare(phi, x)
    na = run_nonadaptive_trial(quad, share)
    a, ap, b, bp = na.outcomes
    assert na.products == (a * b, a * bp, ap * b, ap * bp)
    assert na.chsh_row == a * b + a * bp + ap * b - ap * bp
    assert na.chsh_row in (-2, 2)
    ad = run_adaptive_trial(quad, share)
    for (s_a, s_b), prod in zip(quad.terms(), ad.products):
        assert prod == (1 if math.cos(abs(s_b - s_a)) >= x else -1)


def test_canonical_row_values():
    xs = np.linspace(-1, 1, 2001)
    na = {run_nonadaptive_trial(CANONICAL_SETTINGS, BandShare(0.0, x)).chsh_row for x in xs}
    ad = {run_adaptive_trial(CANONICAL_SETTINGS, BandShare(0.0, x)).chsh_row for x in xs}
    assert na == {-2, 2}
    assert ad == {-2, 2, 4}


# --- Table I ---------------------------------------------------------------------------

def test_table_empty():
    assert reproduce_table1([]) == []


def test_table_zero_row():
    (row,) = reproduce_table1([0.0])
    assert row.outcomes == (P, P, P, P)
    assert row.nonadaptive_chsh == 2
    assert row.adaptive == (P, P, P, M)
    assert row.adaptive_chsh == 4


def test_table_echoes_x_text():
    rows = reproduce_table1(PRINTED_TABLE1_X)
    assert [r.x for r in rows] == list(PRINTED_TABLE1_X)


def test_table_mean_x_diagnostic():
    # the printed footer says <x> = 0; the 20 listed values average 0.0205...
    mean = sum(Fraction(x) for x in PRINTED_TABLE1_X) / 20
    assert mean == Fraction(4103813, 200_000_000)
    assert table1_mean_x(PRINTED_TABLE1_X) == pytest.approx(0.020519065, abs=1e-15)


# --- estimators -------------------------------------------------------------------------

def test_estimate_from_sums():
    est = estimate_from_sums(2, 2, 2)
    assert (est.mean, est.stderr, est.n) == (1.0, 0.0, 2)
    est = estimate_from_sums(0, 2, 2)
    # samples +1 and -1: sample sd sqrt(2), stderr 1
    assert est.stderr == pytest.approx(1.0)
    assert estimate_from_sums(1, 1, 1).stderr == 0.0
    with pytest.raises(ValueError):
        estimate_from_sums(0, 0, 0)


def test_chsh_estimates_converge():
    na, led_na = estimate_chsh("nonadaptive", n=1_000_000, seed=11)
    assert na.analytic == pytest.approx(math.sqrt(2), abs=1e-15)
    assert na.within(4)
    ad, led_ad = estimate_chsh("adaptive", n=1_000_000, seed=11)
    assert ad.analytic == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    assert ad.within(4)
    assert ad.mean > 2
    assert (led_na.cobits_total, led_na.bits_total) == (0, 0)
    assert (led_ad.cobits_total, led_ad.bits_total) == (4_000_000, 0)
    assert led_ad.cobits_per_term == 1.0


def test_identical_settings_give_exactly_two():
    est, _ = estimate_chsh("nonadaptive", SettingsQuad(0, 0, 0, 0), n=10_000, seed=1)
    assert est.mean == 2.0 and est.stderr == 0.0


def test_fresh_shares_variant():
    est, led = estimate_chsh("adaptive", n=400_000, seed=4, fresh_shares=True)
    assert est.within(4)
    assert led.cobits_total == 1_600_000


def test_unknown_protocol_and_orientation():
    with pytest.raises(ValueError):
        estimate_chsh("telepathic", n=10)
    with pytest.raises(ValueError):
        estimate_chsh("nonadaptive", n=10, orientation="spinning")
    with pytest.raises(ValueError):
        estimate_chsh("adaptive", n=0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-math.pi, math.pi), min_size=4, max_size=4), st.sampled_from(["fixed", "uniform"]))
def test_nonadaptive_never_beats_two(angles, orientation):
    est, _ = estimate_chsh("nonadaptive", SettingsQuad(*angles), n=5_000, seed=3, orientation=orientation)
    assert abs(est.mean) <= 2 + 4 * est.stderr


@given(st.lists(st.floats(-math.pi, math.pi), min_size=4, max_size=4))
def test_nonadaptive_analytic_never_beats_two(angles):
    quad = SettingsQuad(*angles)
    total = sum(s * band.pair_expectation(a, b) for s, (a, b) in zip((1, 1, 1, -1), quad.terms()))
    assert abs(total) <= 2 + 1e-12


@pytest.mark.parametrize("protocol", ["nonadaptive", "adaptive"])
def test_partition_and_worker_independence(protocol):
    ref, _ = estimate_chsh(protocol, n=300_001, seed=99, chunk=1 << 16)
    for chunk, workers in [(1000, 1), (77_777, 4), (300_001, 1), (4096, 8)]:
        got, _ = estimate_chsh(protocol, n=300_001, seed=99, chunk=chunk, workers=workers)
        assert got == ref


def test_seed_changes_result():
    a, _ = estimate_chsh("adaptive", n=10_000, seed=1)
    b, _ = estimate_chsh("adaptive", n=10_000, seed=2)
    assert a.mean != b.mean


# --- curves --------------------------------------------------------------------------------

def test_curve_analytic_references():
    ests = estimate_curve("band-adaptive", [0, math.pi / 2, math.pi], 1000, seed=0)
    assert [e.analytic for e in ests] == pytest.approx([1.0, 0.0, -1.0], abs=1e-15)
    (u,) = estimate_curve("band-uniform", [math.pi / 2], 1000)
    assert u.analytic == pytest.approx(1 - 2 / math.pi, abs=1e-15)
    (p,) = estimate_curve("peres", [math.pi / 4], 1000)
    assert p.analytic == pytest.approx(-0.5, abs=1e-15)
    (r,) = estimate_curve("urn", [math.pi / 4], 1000)
    assert r.analytic == pytest.approx(-0.5, abs=1e-12)


@pytest.mark.parametrize("model", ["band-adaptive", "band-uniform", "band-uniform-product", "peres", "urn"])
def test_curve_monte_carlo_agrees(model):
    grid = [0.0, 0.7, math.pi / 2, 2.5, math.pi]
    for est in estimate_curve(model, grid, 200_000, seed=5):
        assert abs(est.mean - est.analytic) <= 4 * est.stderr + 1e-12


def test_curve_errors():
    with pytest.raises(ValueError):
        estimate_curve("band-adaptive", [], 10)
    with pytest.raises(ValueError):
        estimate_curve("peres", [4.0], 10)
    with pytest.raises(ValueError):
        estimate_curve("nonsense", [0.0], 10)


def test_uniform_product_differs_from_linear_law():
    # the physical product average is not the printed closed form away from the ends
    assert uniform_orientation_product_analytic(math.pi / 2) == pytest.approx(1 - 2 * math.sqrt(2) / math.pi, abs=1e-9)
    assert uniform_orientation_product_analytic(0.0) == pytest.approx(1.0, abs=1e-12)


def test_curve_worker_independence():
    a = estimate_curve("peres", [0.3, 1.2], 150_000, seed=8)
    b = estimate_curve("peres", [0.3, 1.2], 150_000, seed=8, workers=4, chunk=10_000)
    assert a == b
