import threading

import pytest
from hypothesis import given, settings, strategies as st

from edgesim.model import (
    LatencyBreakdown,
    MotionFactor,
    ParameterError,
    TierAllocation,
    default_scenario,
    ln_hop_factor,
    processing_time,
    total_latency,
    transmission_time,
)

ONE = MotionFactor.fixed(1.0)
LN10 = 2.302585092994046


def alloc(*pairs):
    return TierAllocation(tuple(pairs))


@pytest.mark.parametrize("hops, expected", [(1, 0.0), (10, LN10), (2, 0.6931471805599453)])
def test_ln_hop_factor(hops, expected):
    assert ln_hop_factor(hops) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("hops", [0, -3, 2.5])
def test_ln_hop_factor_rejects_bad_topology(hops):
    with pytest.raises(ParameterError):
        ln_hop_factor(hops)


def test_transmission_fog_all_to_fog():
    t = transmission_time(alloc(("fog", 1000.0), ("cloud", 0.0)), default_scenario("fog"), ONE)
    assert t == pytest.approx(2 * (1000 / 37 + 1000 / 37), rel=1e-12)
    assert t == pytest.approx(108.108108, abs=1e-6)


def test_transmission_mec_all_to_mec():
    t = transmission_time(alloc(("mec", 1000.0), ("cloud", 0.0)), default_scenario("mec"), ONE)
    assert t == pytest.approx(5.0, rel=1e-12)


def test_transmission_mec_with_cloud_overflow():
    t = transmission_time(alloc(("mec", 2000.0), ("cloud", 500.0)), default_scenario("mec"), ONE)
    assert t == pytest.approx(2 * (3.125 + 2.5 + LN10 * 0.625), rel=1e-12)
    assert t == pytest.approx(14.128, abs=1e-3)


@pytest.mark.parametrize("model", ["fog", "mec", "hybrid"])
def test_transmission_zero_volume(model):
    p = default_scenario(model)
    zero = TierAllocation(tuple((t.name, 0.0) for t in p.tiers))
    assert transmission_time(zero, p, ONE) == 0.0
    assert processing_time(zero, p) == 0.0


def test_processing_times():
    assert processing_time(alloc(("fog", 1000.0), ("cloud", 0.0)), default_scenario("fog")) == 1.0
    mec = processing_time(alloc(("mec", 2000.0), ("cloud", 500.0)), default_scenario("mec"))
    assert mec == pytest.approx(1.0 + 500 / 10_000, rel=1e-15)


def test_processing_scales_with_cycle_duration():
    p = default_scenario("mec", cycle_duration_s=0.5)
    assert processing_time(alloc(("mec", 2000.0), ("cloud", 0.0)), p) == 0.5


def test_allocation_must_match_scenario_tiers():
    with pytest.raises(ParameterError):
        processing_time(alloc(("fog", 1.0), ("cloud", 0.0)), default_scenario("mec"))


@pytest.mark.parametrize(
    "model, volume, tx, proc",
    [
        ("mec", 1000.0, 5.0, 0.5),
        ("hybrid", 2500.0, 2 * (3.125 + 2.5 + 0.625 + 0.0), 2000 / 2000 + 500 / 1000),
        ("fog", 1000.0, 2 * (1000 / 37 + 1000 / 37), 1.0),
    ],
)
def test_total_latency_hand_values(model, volume, tx, proc):
    out = total_latency(volume, default_scenario(model), ONE)
    assert out.transmission_s == pytest.approx(tx, rel=1e-12)
    assert out.processing_s == pytest.approx(proc, rel=1e-12)
    assert out.total_s == pytest.approx(tx + proc, rel=1e-12)


def test_total_latency_fog_published_figure():
    assert total_latency(1000.0, default_scenario("fog"), ONE).total_s == pytest.approx(109.108, abs=1e-3)


def test_total_latency_multiple_ues_sums_per_ue():
    one = total_latency(500.0, default_scenario("fog"), ONE).total_s
    four = total_latency(2000.0, default_scenario("fog", ue_count=4), ONE).total_s
    assert four == pytest.approx(4 * one, rel=1e-12)


def test_default_scenarios():
    fog, mec, hybrid = (default_scenario(m) for m in ("fog", "mec", "hybrid"))
    assert fog.access_speed == 37.0
    assert fog.tier("fog").link_speed == 37.0
    assert fog.alpha_range == (0.7, 1.0)
    assert fog.tier("fog").capacity == 1000.0
    assert mec.alpha_range == (0.8, 1.0)
    assert mec.access_speed == 800.0
    assert mec.tier("mec").capacity == 2000.0
    assert hybrid.tier("u-mec").capacity == 2000.0
    assert hybrid.tier("c-mec").capacity == 1000.0
    assert hybrid.alpha_range == (0.9, 1.0)
    for p in (fog, mec, hybrid):
        assert p.backhaul_hops == 10
        assert p.cloud.capacity == 10_000.0
        assert p.cycle_duration_s == 1.0
        assert p.ue_count == 1
        assert [t.is_cloud for t in p.tiers][-1]
    assert [t.name for t in hybrid.tiers] == ["u-mec", "c-mec", "cloud"]


def test_default_scenario_unknown_model():
    with pytest.raises(ParameterError, match="model_name"):
        default_scenario("cloudlet")


@pytest.mark.parametrize(
    "kwargs, field",
    [
        ({"alpha_range": (0.0, 1.0)}, "alpha_range"),
        ({"alpha_range": (0.9, 0.8)}, "alpha_range"),
        ({"backhaul_hops": 0}, "backhaul_hops"),
        ({"ue_count": 0}, "ue_count"),
        ({"cycle_duration_s": 0.0}, "cycle_duration_s"),
        ({"access_speed": -1.0}, "access_speed"),
        ({"alpha_semantics": "other"}, "alpha_semantics"),
    ],
)
def test_scenario_invariants(kwargs, field):
    with pytest.raises(ParameterError) as info:
        default_scenario("mec", **kwargs)
    assert info.value.field == field


def test_motion_factor_bounds():
    with pytest.raises(ParameterError):
        MotionFactor(0.6, 0.7, 1.0)
    with pytest.raises(ParameterError):
        MotionFactor.fixed(0.0)
    assert MotionFactor.midpoint((0.7, 1.0)).alpha == pytest.approx(0.85)


def test_printed_formula_semantics():
    p = default_scenario("mec", alpha_semantics="printed_formula")
    out = total_latency(1000.0, p, MotionFactor.fixed(0.8))
    assert out.transmission_s == pytest.approx(2 * (0.8 * 1000 / 800 + 1000 / 800), rel=1e-12)


def test_pure_under_threads():
    p = default_scenario("hybrid")
    expected = total_latency(2500.0, p, ONE)
    results = []
    threads = [threading.Thread(target=lambda: results.append(total_latency(2500.0, p, ONE))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)


# -- properties ---------------------------------------------------------------

models = st.sampled_from(["fog", "mec", "hybrid"])
volumes = st.floats(min_value=0, max_value=10_000, allow_nan=False)
alphas = st.floats(min_value=0.05, max_value=1.0)


@given(models, volumes, alphas)
def test_additivity_exact(model, volume, a):
    out = total_latency(volume, default_scenario(model), MotionFactor.fixed(a))
    assert out.total_s == out.transmission_s + out.processing_s


@given(models, alphas, st.integers(1, 50))
def test_zero_law(model, a, hops):
    out = total_latency(0.0, default_scenario(model, backhaul_hops=hops), MotionFactor.fixed(a))
    assert out == LatencyBreakdown(0.0, 0.0)


@given(models, volumes, volumes, alphas)
def test_monotone_in_volume(model, v1, v2, a):
    lo, hi = sorted((v1, v2))
    p = default_scenario(model)
    f = MotionFactor.fixed(a)
    assert total_latency(lo, p, f).total_s <= total_latency(hi, p, f).total_s


@given(models, st.floats(min_value=3100, max_value=9000))
def test_hop_law(model, volume):
    # volume large enough that the cloud receives a share in every model
    p1 = default_scenario(model, backhaul_hops=1)
    no_cloud_leg = p1.with_tier("cloud", link_speed=1e-9)
    a = total_latency(volume, p1, ONE)
    b = total_latency(volume, no_cloud_leg, ONE)
    assert a == b  # cloud link speed is irrelevant when ln H = 0
    p10 = default_scenario(model)
    assert total_latency(volume, p10, ONE).processing_s == a.processing_s
    assert total_latency(volume, p10, ONE).transmission_s > a.transmission_s


@given(models, volumes, alphas, alphas)
def test_alpha_law(model, volume, a1, a2):
    lo, hi = sorted((a1, a2))
    p = default_scenario(model)
    slow = total_latency(volume, p, MotionFactor.fixed(lo))
    fast = total_latency(volume, p, MotionFactor.fixed(hi))
    assert fast.total_s <= slow.total_s
    assert fast.processing_s == slow.processing_s


@settings(max_examples=200)
@given(models, st.floats(min_value=0, max_value=500), alphas)
def test_linear_below_first_capacity(model, volume, a):
    p = default_scenario(model)
    f = MotionFactor.fixed(a)
    # first tier capacity is >= 1000 MB in every model, so V and 2V stay under it
    assert total_latency(2 * volume, p, f).total_s == pytest.approx(2 * total_latency(volume, p, f).total_s, rel=1e-12)
