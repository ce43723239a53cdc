"""Agent-based execution of a scenario over a simulated clock.

Each UE uploads its data to the access node (BS, 5G gNB or 5G CU-UP),
which splits it with the offload policy and sends every non-empty share
to its tier as a request. Tiers process and reply along the reverse
path. The access node drives one tier round-trip at a time and answers
the UE after the last one, and UEs take turns on the shared access
node. Latency is the simulated span from the first upload to the last
reply, so it matches the closed-form sum in ``edgesim.model``.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from edgesim.model import (
    MotionFactor,
    ParameterError,
    ScenarioParams,
    TierAllocation,
    tier_link_time,
    tier_processing_time,
    total_latency,
    uplink_time,
)
from edgesim.policy import PolicyConfig, default_policy, split

RELATIVE_TOLERANCE = 1e-9


class ConsistencyError(RuntimeError):
    """Simulated latency disagrees with the closed-form model."""


class Role(str, Enum):
    UE = "UE"
    BS = "BS"
    GNB = "GNB"
    CU_UP = "CU_UP"
    CU_CP = "CU_CP"
    FOG = "FOG"
    MEC = "MEC"
    U_MEC = "U_MEC"
    C_MEC = "C_MEC"
    CLOUD = "CLOUD"


TIER_ROLES = {
    "fog": Role.FOG,
    "mec": Role.MEC,
    "u-mec": Role.U_MEC,
    "c-mec": Role.C_MEC,
    "cloud": Role.CLOUD,
}


@dataclass(frozen=True, order=True)
class AgentId:
    role: Role
    index: int = 0

    def __str__(self):
        return f"{self.role.value}#{self.index}"


class MessageKind(str, Enum):
    DATA_UPLOAD = "DataUpload"
    PROCESS_REQUEST = "ProcessRequest"
    PROCESSED_REPLY = "ProcessedReply"


@dataclass
class SimMessage:
    kind: MessageKind
    payload_volume: float
    sender: AgentId
    receiver: AgentId
    sent_at: float
    arrives_at: float
    route: tuple[AgentId, ...] = ()  # access node .. server, for tier traffic
    ue: AgentId | None = None


# --------------------------------------------------------------------------
# RNG


class RngState:
    """Seeded motion-factor stream on MT19937 (``random.Random``).

    Python's ``random()`` output for an integer seed is stable across
    platforms and versions, and ``uniform(a, b)`` is ``a + (b - a) *
    random()``, so CSV golden files stay byte-stable.
    """

    algorithm = "MT19937"

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
        self._gen = random.Random(self.seed)

    def uniform(self, low: float, high: float) -> float:
        return self._gen.uniform(low, high)

    def derive(self, *keys) -> "RngState":
        """Independent child stream keyed by e.g. (model, volume index, repetition)."""
        text = ":".join(str(k) for k in (self.seed,) + keys)
        digest = hashlib.sha256(text.encode()).digest()
        return RngState(int.from_bytes(digest[:8], "big"))


def sample_alpha(rng: RngState, alpha_range: tuple[float, float]) -> MotionFactor:
    low, high = alpha_range
    value = rng.uniform(low, high)
    # uniform() may round one ulp past high
    value = min(max(value, low), high)
    return MotionFactor(value, low, high)


# --------------------------------------------------------------------------
# Clock


class SimClock:
    """Event queue ordered by (time, insertion sequence)."""

    def __init__(self):
        self.now = 0.0
        self._queue: list = []
        self._seq = itertools.count()

    def schedule(self, at: float, action: Callable, *args) -> None:
        if at < self.now:
            raise ValueError(f"cannot schedule in the past ({at} < {self.now})")
        heapq.heappush(self._queue, (at, next(self._seq), action, args))

    def run(self) -> None:
        while self._queue:
            at, _, action, args = heapq.heappop(self._queue)
            self.now = at
            action(*args)


# --------------------------------------------------------------------------
# Topology


@dataclass(frozen=True)
class Link:
    """Undirected leg between two agents.

    ``tier`` names the tier whose speed (and cloud hop penalty) the leg
    uses; ``uplink`` marks the UE leg, which is scaled by alpha. A link
    with neither costs nothing (the CU-UP to CU-CP hop).
    """

    a: AgentId
    b: AgentId
    tier: str | None = None
    uplink: bool = False


@dataclass
class Topology:
    model: str
    agents: list[AgentId]
    links: dict[frozenset, Link]
    access: AgentId
    ues: list[AgentId]
    tier_agents: dict[str, AgentId]
    routes: dict[str, tuple[AgentId, ...]]

    @property
    def roles(self) -> set[Role]:
        return {a.role for a in self.agents}

    def link(self, a: AgentId, b: AgentId) -> Link:
        return self.links[frozenset((a, b))]


def build_topology(params: ScenarioParams) -> Topology:
    """Agent graph for the scenario's model.

    fog: UE-BS-{FOG, CLOUD}; mec: UE-GNB-{MEC, CLOUD};
    hybrid: UE-CU_UP-U_MEC and CU_UP-CU_CP-{C_MEC, CLOUD}.
    """
    model = params.model_name
    access_role = {"fog": Role.BS, "mec": Role.GNB, "hybrid": Role.CU_UP}.get(model)
    if access_role is None:
        raise ParameterError("model_name", f"unknown model {model!r}")
    access = AgentId(access_role)
    ues = [AgentId(Role.UE, i) for i in range(params.ue_count)]
    agents = list(ues) + [access]
    links: dict[frozenset, Link] = {}

    def connect(a, b, **kw):
        links[frozenset((a, b))] = Link(a, b, **kw)

    for ue in ues:
        connect(ue, access, uplink=True)

    tier_agents = {t.name: AgentId(TIER_ROLES[t.name]) for t in params.tiers}
    routes = {}
    if model == "hybrid":
        cp = AgentId(Role.CU_CP)
        agents.append(cp)
        connect(access, cp)
        for name, agent in tier_agents.items():
            if name == "u-mec":
                connect(access, agent, tier=name)
                routes[name] = (access, agent)
            else:
                connect(cp, agent, tier=name)
                routes[name] = (access, cp, agent)
    else:
        for name, agent in tier_agents.items():
            connect(access, agent, tier=name)
            routes[name] = (access, agent)
    agents.extend(tier_agents.values())
    return Topology(model, agents, links, access, ues, tier_agents, routes)


# --------------------------------------------------------------------------
# Agents


class Agent:
    def __init__(self, sim: "Simulation", agent_id: AgentId):
        self.sim = sim
        self.id = agent_id

    def receive(self, msg: SimMessage) -> None:
        raise NotImplementedError

    def forward(self, msg: SimMessage) -> None:
        """Relay tier traffic one hop along its route."""
        pos = msg.route.index(self.id)
        if msg.kind is MessageKind.PROCESS_REQUEST:
            nxt = msg.route[pos + 1]
        else:
            nxt = msg.route[pos - 1]
        self.sim.send(msg.kind, self.id, nxt, msg.payload_volume, route=msg.route, ue=msg.ue)


class UEAgent(Agent):
    def __init__(self, sim, agent_id, volume: float):
        super().__init__(sim, agent_id)
        self.volume = volume
        self.started_at: float | None = None
        self.finished_at: float | None = None

    def start(self) -> None:
        self.started_at = self.sim.clock.now
        self.sim.send(MessageKind.DATA_UPLOAD, self.id, self.sim.topology.access, self.volume, ue=self.id)

    def receive(self, msg):
        self.finished_at = self.sim.clock.now
        self.sim.ue_done(self)


class AccessAgent(Agent):
    """BS / gNB / CU-UP: splits uploads and drives tier round-trips one at a time."""

    def __init__(self, sim, agent_id):
        super().__init__(sim, agent_id)
        self.pending: list[tuple[str, float]] = []
        self.current_ue: AgentId | None = None
        self.current_volume = 0.0

    def receive(self, msg):
        if msg.kind is MessageKind.DATA_UPLOAD:
            alloc = split(msg.payload_volume, self.sim.params, self.sim.policy)
            self.sim.allocations.append(alloc)
            self.current_ue = msg.ue
            self.current_volume = msg.payload_volume
            self.pending = [(name, v) for name, v in alloc.per_tier if v > 0]
            self._dispatch()
        elif msg.kind is MessageKind.PROCESSED_REPLY:
            self.sim.replies_received += 1
            self._dispatch()
        else:
            raise AssertionError(f"access node got {msg.kind}")

    def _dispatch(self):
        if self.pending:
            name, volume = self.pending.pop(0)
            route = self.sim.topology.routes[name]
            self.sim.requests_sent += 1
            self.sim.send(MessageKind.PROCESS_REQUEST, self.id, route[1], volume, route=route, ue=self.current_ue)
        else:
            self.sim.send(MessageKind.PROCESSED_REPLY, self.id, self.current_ue, self.current_volume, ue=self.current_ue)


class RelayAgent(Agent):
    """CU-CP: passes requests on to C-MEC / cloud and replies back."""

    def receive(self, msg):
        self.forward(msg)


class ServerAgent(Agent):
    def __init__(self, sim, agent_id, tier):
        super().__init__(sim, agent_id)
        self.tier = tier
        self.processed = 0.0

    def receive(self, msg):
        if msg.kind is not MessageKind.PROCESS_REQUEST:
            raise AssertionError(f"{self.id} got {msg.kind}")
        delay = tier_processing_time(msg.payload_volume, self.tier, self.sim.params.cycle_duration_s)
        self.sim.processing_s += delay
        self.processed += msg.payload_volume
        self.sim.clock.schedule(self.sim.clock.now + delay, self._reply, msg)

    def _reply(self, msg):
        self.sim.send(MessageKind.PROCESSED_REPLY, self.id, msg.route[-2], msg.payload_volume, route=msg.route, ue=msg.ue)


# --------------------------------------------------------------------------
# Simulation


@dataclass
class PointResult:
    model: str
    volume_mb: float
    alpha_used: float
    transmission_s: float
    processing_s: float
    total_s: float
    allocation: TierAllocation
    repetition: int = 0


class Simulation:
    def __init__(self, params: ScenarioParams, alpha: MotionFactor, policy: PolicyConfig | None = None):
        self.params = params
        self.alpha = alpha
        self.policy = policy or default_policy(params)
        self.topology = build_topology(params)
        self.clock = SimClock()
        self.messages: list[SimMessage] = []
        self.allocations: list[TierAllocation] = []
        self.transmission_s = 0.0
        self.processing_s = 0.0
        self.requests_sent = 0
        self.replies_received = 0
        self.agents: dict[AgentId, Agent] = {}
        self._ue_queue: list[UEAgent] = []

    def _link_delay(self, link: Link, volume: float) -> float:
        if link.uplink:
            return uplink_time(volume, self.params.access_speed, self.alpha.alpha, self.params.alpha_semantics)
        if link.tier is not None:
            return tier_link_time(volume, self.params.tier(link.tier), self.params.backhaul_hops)
        return 0.0

    def send(self, kind, sender, receiver, volume, route=(), ue=None) -> None:
        delay = self._link_delay(self.topology.link(sender, receiver), volume)
        self.transmission_s += delay
        now = self.clock.now
        msg = SimMessage(kind, volume, sender, receiver, now, now + delay, route, ue)
        self.messages.append(msg)
        self.clock.schedule(msg.arrives_at, self.agents[receiver].receive, msg)

    def ue_done(self, ue: UEAgent) -> None:
        if self._ue_queue:
            self._ue_queue.pop(0).start()

    def run(self, volume: float) -> "Simulation":
        if not math.isfinite(volume) or volume < 0:
            raise ParameterError("volume", f"must be a non-negative volume in MB, got {volume!r}")
        topo = self.topology
        per_ue = volume / self.params.ue_count
        ues = [UEAgent(self, ue_id, per_ue) for ue_id in topo.ues]
        for ue in ues:
            self.agents[ue.id] = ue
        self.agents[topo.access] = AccessAgent(self, topo.access)
        for agent_id in topo.agents:
            if agent_id.role is Role.CU_CP:
                self.agents[agent_id] = RelayAgent(self, agent_id)
        for name, agent_id in topo.tier_agents.items():
            self.agents[agent_id] = ServerAgent(self, agent_id, self.params.tier(name))

        self._ue_queue = ues[1:]
        self.clock.schedule(0.0, ues[0].start)
        self.clock.run()
        self._ues = ues
        return self

    @property
    def span_s(self) -> float:
        return max(u.finished_at for u in self._ues) - min(u.started_at for u in self._ues)

    def processed_volumes(self) -> TierAllocation:
        return TierAllocation(tuple(
            (name, self.agents[agent_id].processed) for name, agent_id in self.topology.tier_agents.items()
        ))


def run_scenario(
    params: ScenarioParams,
    volume: float,
    rng: RngState | None = None,
    *,
    alpha: MotionFactor | None = None,
    policy: PolicyConfig | None = None,
    repetition: int = 0,
    check: bool = True,
) -> PointResult:
    """Simulate one request of ``volume`` MB and measure its latency.

    alpha is drawn from ``rng`` over the scenario's range unless given
    explicitly. With ``check`` on, the measured span is compared against
    the closed form and a ``ConsistencyError`` is raised on divergence.
    """
    if alpha is None:
        if rng is None:
            raise ValueError("need either rng or alpha")
        alpha = sample_alpha(rng, params.alpha_range)
    sim = Simulation(params, alpha, policy).run(volume)
    span = sim.span_s
    if check:
        expected = total_latency(volume, params, alpha, sim.policy).total_s
        if not math.isclose(span, expected, rel_tol=RELATIVE_TOLERANCE, abs_tol=0.0) and not (
            expected == 0.0 and span == 0.0
        ):
            raise ConsistencyError(
                f"{params.model_name} V={volume} MB alpha={alpha.alpha}: "
                f"simulated {span!r} s vs closed form {expected!r} s"
            )
    return PointResult(
        model=params.model_name,
        volume_mb=float(volume),
        alpha_used=alpha.alpha,
        transmission_s=sim.transmission_s,
        processing_s=sim.processing_s,
        total_s=span,
        allocation=sim.processed_volumes(),
        repetition=repetition,
    )
