import math

import pytest

from edgesim import sim as sim_mod
from edgesim.model import MotionFactor, default_scenario, total_latency
from edgesim.policy import PolicyConfig
from edgesim.sim import (
    AgentId,
    ConsistencyError,
    MessageKind,
    RngState,
    Role,
    SimClock,
    Simulation,
    build_topology,
    run_scenario,
    sample_alpha,
)
from edgesim.sweep import SweepConfig

ONE = MotionFactor.fixed(1.0)


@pytest.mark.parametrize(
    "model, roles",
    [
        ("fog", {Role.UE, Role.BS, Role.FOG, Role.CLOUD}),
        ("mec", {Role.UE, Role.GNB, Role.MEC, Role.CLOUD}),
        ("hybrid", {Role.UE, Role.CU_UP, Role.CU_CP, Role.U_MEC, Role.C_MEC, Role.CLOUD}),
    ],
)
def test_topology_agents(model, roles):
    topo = build_topology(default_scenario(model))
    assert topo.roles == roles
    assert len(topo.agents) == len(roles)


def test_hybrid_routes_go_through_control_plane():
    topo = build_topology(default_scenario("hybrid"))
    up, cp = AgentId(Role.CU_UP), AgentId(Role.CU_CP)
    assert topo.routes["u-mec"] == (up, AgentId(Role.U_MEC))
    assert topo.routes["c-mec"] == (up, cp, AgentId(Role.C_MEC))
    assert topo.routes["cloud"] == (up, cp, AgentId(Role.CLOUD))


def test_topology_scales_with_ue_count():
    topo = build_topology(default_scenario("mec", ue_count=3))
    assert len(topo.ues) == 3
    assert len(topo.agents) == 6


def test_sample_alpha_degenerate_range():
    assert sample_alpha(RngState(1), (1.0, 1.0)).alpha == 1.0


def test_sample_alpha_in_range_and_deterministic():
    a, b = RngState(42), RngState(42)
    xs = [sample_alpha(a, (0.7, 1.0)).alpha for _ in range(1000)]
    ys = [sample_alpha(b, (0.7, 1.0)).alpha for _ in range(1000)]
    assert xs == ys
    assert all(0.7 <= x <= 1.0 for x in xs)


def test_rng_reference_sequence():
    # MT19937 as seeded by CPython's random.Random(42)
    rng = RngState(42)
    assert rng.uniform(0.0, 1.0) == 0.6394267984578837
    assert rng.uniform(0.0, 1.0) == 0.025010755222666936


def test_derived_streams_are_distinct_and_stable():
    root = RngState(42)
    assert root.derive("mec", 0, 0).seed == RngState(42).derive("mec", 0, 0).seed
    assert root.derive("mec", 0, 0).seed != root.derive("mec", 1, 0).seed


def test_clock_orders_ties_by_insertion():
    clock = SimClock()
    seen = []
    for tag in "abc":
        clock.schedule(1.0, seen.append, tag)
    clock.schedule(0.5, seen.append, "first")
    clock.run()
    assert seen == ["first", "a", "b", "c"]
    assert clock.now == 1.0
    with pytest.raises(ValueError):
        clock.schedule(0.1, seen.append, "late")


@pytest.mark.parametrize(
    "model, volume, expected",
    [("mec", 1000.0, 5.5), ("hybrid", 2500.0, 14.0), ("fog", 1000.0, 2 * 2000 / 37 + 1.0)],
)
def test_run_scenario_matches_hand_values(model, volume, expected):
    r = run_scenario(default_scenario(model), volume, alpha=ONE)
    assert r.total_s == pytest.approx(expected, rel=1e-12)
    assert r.alpha_used == 1.0


@pytest.mark.parametrize("model", ["fog", "mec", "hybrid"])
def test_zero_volume(model):
    r = run_scenario(default_scenario(model), 0.0, RngState(3))
    assert r.total_s == 0.0
    assert r.transmission_s == 0.0 and r.processing_s == 0.0


@pytest.mark.parametrize("model", ["fog", "mec", "hybrid"])
@pytest.mark.parametrize("seed", range(5))
def test_oracle_equivalence(model, seed):
    p = default_scenario(model)
    for i, v in enumerate(SweepConfig().volumes()):
        rng = RngState(seed).derive(model, i, 0)
        r = run_scenario(p, v, rng, check=False)
        expected = total_latency(v, p, MotionFactor(r.alpha_used, *p.alpha_range))
        assert abs(r.total_s - expected.total_s) / expected.total_s <= 1e-9
        assert r.transmission_s == pytest.approx(expected.transmission_s, rel=1e-9)
        assert r.processing_s == pytest.approx(expected.processing_s, rel=1e-9)


def test_bit_identical_reruns():
    p = default_scenario("hybrid")
    a = run_scenario(p, 2750.0, RngState(9))
    b = run_scenario(p, 2750.0, RngState(9))
    assert a == b


@pytest.mark.parametrize("model, volume", [("fog", 2500.0), ("mec", 4000.0), ("hybrid", 5000.0), ("hybrid", 0.0)])
def test_event_ordering_and_no_lost_work(model, volume):
    s = Simulation(default_scenario(model, ue_count=2), ONE).run(volume)
    assert s.messages
    assert all(m.arrives_at >= m.sent_at for m in s.messages)
    times = [m.sent_at for m in s.messages]
    assert times == sorted(times)
    assert s.requests_sent == s.replies_received
    uploads = [m for m in s.messages if m.kind is MessageKind.DATA_UPLOAD]
    ue_replies = [m for m in s.messages if m.kind is MessageKind.PROCESSED_REPLY and m.receiver.role is Role.UE]
    assert len(uploads) == len(ue_replies) == 2
    assert math.fsum(v for _, v in s.processed_volumes().per_tier) == pytest.approx(volume, abs=0)


def test_conservation_through_pipeline():
    r = run_scenario(default_scenario("hybrid"), 3500.0, alpha=ONE)
    assert r.allocation.as_dict() == {"u-mec": 2000.0, "c-mec": 1000.0, "cloud": 500.0}
    assert r.allocation.total == 3500.0


def test_multi_ue_span_is_sum_of_ue_latencies():
    p = default_scenario("fog", ue_count=4)
    r = run_scenario(p, 3000.0, alpha=ONE)
    assert r.total_s == pytest.approx(4 * total_latency(750.0, default_scenario("fog"), ONE).total_s, rel=1e-12)
    assert r.allocation.total == 3000.0


def test_printed_formula_matches_oracle():
    p = default_scenario("mec", alpha_semantics="printed_formula")
    r = run_scenario(p, 2300.0, RngState(5))
    assert r.total_s == pytest.approx(total_latency(2300.0, p, MotionFactor(r.alpha_used, 0.8, 1.0)).total_s, rel=1e-12)


def test_custom_policy_used_by_access_node():
    p = default_scenario("hybrid")
    pol = PolicyConfig(("c-mec", "u-mec", "cloud"), {"u-mec": 2000.0, "c-mec": 1000.0})
    r = run_scenario(p, 1500.0, alpha=ONE, policy=pol)
    assert r.allocation.as_dict() == {"u-mec": 500.0, "c-mec": 1000.0, "cloud": 0.0}


def test_divergence_is_reported(monkeypatch):
    real = sim_mod.total_latency

    def skewed(*args, **kwargs):
        out = real(*args, **kwargs)
        return type(out)(out.transmission_s * 1.001, out.processing_s)

    monkeypatch.setattr(sim_mod, "total_latency", skewed)
    with pytest.raises(ConsistencyError, match="closed form"):
        run_scenario(default_scenario("mec"), 1000.0, alpha=ONE)


def test_needs_rng_or_alpha():
    with pytest.raises(ValueError):
        run_scenario(default_scenario("mec"), 10.0)
