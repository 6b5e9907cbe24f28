"""
Event-driven mode: continuous-time motion of the VoI and of an opposite-direction Poisson helper stream along a
highway with `horizon_cycles + 1` infrastructure points at 0, d, 2d, ...

Geometry. The VoI starts at -r_I (entering the coverage of I_0) and moves towards +x; cycle k runs from its entry into
the nominal coverage of I_k to the entry into the nominal coverage of I_{k+1}. Helpers start at every point of a
Poisson stream ahead of the VoI and move towards -x. A helper is assigned to the cycle in which its contact with the
VoI starts, and serves the VoI from the infrastructure it passed last, I_{k+1}.

Links. Every link is described by the intervals during which it is up. Under a fixed-range connection model a contact
is a single interval. Otherwise the range is redrawn on a global time grid of width tau, and the link is up in the
part of each slot where the distance stays within the range drawn for that slot.

Service. Every infrastructure serves one available vehicle at a time: the VoI first, then helpers in the order in
which their links first came up. With fixed ranges this is first in first out: a helper is served from max(its entry,
the latest exit of its predecessors) until it leaves. Whenever the VoI has no link to an infrastructure it receives
from the helpers of the current cycle, again one at a time in contact order, until a helper's buffer is empty or its
link goes down. Buffers only ever hold data from the helper's own source infrastructure and are dropped once the
contact is over.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from ..builders import build_channel, build_connection, build_mobility
from ..configs import ModelConfig
from ..constants import LinkKind, StreamComponent
from ..scenario import Scenario
from ..utils import Logger, make_stream
from .connection import nominal_range
from .mobility import Trajectory
from .traces import CycleTrace
from .traffic import poisson_points


__all__ = ["EventEngineError", "EventStreams", "EventDrivenEngine", "run_event_driven"]

logger = Logger(__name__)

# relative slack of the per-cycle conservation ledger
_LEDGER_RTOL = 1e-9


class EventEngineError(RuntimeError):
    pass


@dataclass
class EventStreams:
    """
    One independent random stream per model component of a replication
    """

    traffic: np.random.Generator
    voi_mobility: np.random.Generator
    helper_mobility: np.random.Generator
    connection: np.random.Generator
    channel: np.random.Generator

    @classmethod
    def from_seed(cls, master_seed: int, replication: int) -> "EventStreams":
        return cls(
            traffic=make_stream(master_seed, replication, StreamComponent.TRAFFIC),
            voi_mobility=make_stream(master_seed, replication, StreamComponent.VOI_MOBILITY),
            helper_mobility=make_stream(master_seed, replication, StreamComponent.HELPER_MOBILITY),
            connection=make_stream(master_seed, replication, StreamComponent.CONNECTION),
            channel=make_stream(master_seed, replication, StreamComponent.CHANNEL),
        )

    @classmethod
    def from_stream(cls, stream: np.random.Generator) -> "EventStreams":
        keys = stream.integers(0, 2**63, size=5)
        children = [np.random.Generator(np.random.Philox(key=int(k))) for k in keys]
        return cls(*children)


@dataclass
class _Links:
    """
    Link-up intervals [start[m], end[m]) of several contacts, interval m belonging to contact `owner[m]`
    """

    owner: np.ndarray
    start: np.ndarray
    end: np.ndarray

    @classmethod
    def empty(cls) -> "_Links":
        return cls(np.zeros(0, dtype=int), np.zeros(0), np.zeros(0))

    def first_start(self, size: int) -> np.ndarray:
        out = np.full(size, np.inf)
        np.minimum.at(out, self.owner, self.start)
        return out

    def last_end(self, size: int) -> np.ndarray:
        out = np.full(size, -np.inf)
        np.maximum.at(out, self.owner, self.end)
        return out

    def up_time(self, size: int) -> np.ndarray:
        return np.bincount(self.owner, weights=self.end - self.start, minlength=size)

    def clip(self, lo: float, hi: float) -> "_Links":
        start, end = np.maximum(self.start, lo), np.minimum(self.end, hi)
        keep = end > start
        return _Links(self.owner[keep], start[keep], end[keep])

    def of(self, owners: np.ndarray) -> "_Links":
        """
        Intervals of the given contacts, renumbered by their position in `owners`
        """
        position = np.full(int(self.owner.max(initial=-1)) + 1, -1)
        known = owners[owners < position.size]
        position[known] = np.flatnonzero(owners < position.size)
        keep = position[self.owner] >= 0
        return _Links(position[self.owner[keep]], self.start[keep], self.end[keep])


def _concat(*links: _Links, offsets) -> _Links:
    return _Links(
        owner=np.concatenate([part.owner + o for part, o in zip(links, offsets)]),
        start=np.concatenate([part.start for part in links]),
        end=np.concatenate([part.end for part in links]),
    )


@dataclass
class _HelperState:
    u: np.ndarray
    v2v: _Links
    contact_start: np.ndarray
    contact_end: np.ndarray
    cycle: np.ndarray
    trajectories: Optional[List[Trajectory]] = None

    @property
    def source(self) -> np.ndarray:
        return self.cycle + 1

    def subset(self, mask: np.ndarray) -> "_HelperState":
        return _HelperState(
            u=self.u[mask],
            v2v=self.v2v.of(np.flatnonzero(mask)),
            contact_start=self.contact_start[mask],
            contact_end=self.contact_end[mask],
            cycle=self.cycle[mask],
            trajectories=None if self.trajectories is None else [t for t, m in zip(self.trajectories, mask) if m],
        )


def _meeting_times(voi: Trajectory, helper: Trajectory, targets) -> np.ndarray:
    """
    Times at which the VoI and a helper have together closed the given initial distances
    """
    times = np.union1d(voi.times, helper.times)
    closed = voi.offset_at(times) + helper.offset_at(times)
    return np.interp(targets, closed, times)


def _rowwise(per_row: List[Callable]) -> Callable[[np.ndarray], np.ndarray]:
    def time_at(x):
        return np.stack([f(row) for f, row in zip(per_row, x)]) if len(per_row) else np.zeros(np.shape(x))

    return time_at


def _served_time(rank: np.ndarray, links: _Links, size: int) -> np.ndarray:
    """
    Time each contact is served when the transmitter always serves the available contact of lowest rank.

    Args:
        rank: Rank of every contact, indexed by `links.owner`
        links: Link-up intervals
        size: Number of contacts

    Returns:
        Served time per contact
    """
    served = np.zeros(size)
    if links.owner.size == 0:
        return served
    edges = np.unique(np.concatenate([links.start, links.end]))
    lo = np.searchsorted(edges, links.start)
    hi = np.searchsorted(edges, links.end)
    interval_rank = rank[links.owner]
    winner = np.full(edges.size - 1, -1)
    # paint from the lowest priority up, so the best ranked available contact is left on every piece
    for m in np.argsort(-interval_rank, kind="stable"):
        winner[lo[m]:hi[m]] = links.owner[m]
    busy = winner >= 0
    np.add.at(served, winner[busy], np.diff(edges)[busy])
    return served


def _drain_buffers(links: _Links, blocked: _Links, budget: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """
    Bits each helper hands over when the VoI receives from the available helper that came into contact first, and
    from nobody while it is blocked.

    Args:
        links: V2V link-up intervals, owners ranked by contact order
        blocked: Intervals in which the VoI is busy with an infrastructure
        budget: Buffered bits per helper
        rates: V2V rate per helper

    Returns:
        Sent bits per helper
    """
    sent = np.zeros(budget.size)
    links = links.clip(-np.inf, np.inf)
    if links.owner.size == 0:
        return sent
    edges = np.unique(np.concatenate([links.start, links.end, blocked.start, blocked.end]))
    opening = [[] for _ in range(edges.size)]
    closing = [[] for _ in range(edges.size)]
    for owner, lo, hi in zip(links.owner, np.searchsorted(edges, links.start), np.searchsorted(edges, links.end)):
        opening[lo].append(owner)
        closing[hi].append(owner)
    block = np.zeros(edges.size, dtype=int)
    np.add.at(block, np.searchsorted(edges, blocked.start), 1)
    np.add.at(block, np.searchsorted(edges, blocked.end), -1)
    block = np.cumsum(block)

    available = np.zeros(budget.size, dtype=bool)
    left = budget.astype(float).copy()
    for e in range(edges.size - 1):
        available[closing[e]] = False
        available[opening[e]] = True
        if block[e] > 0:
            continue
        remaining = edges[e + 1] - edges[e]
        for i in np.flatnonzero(available & (left > 0) & (rates > 0)):
            amount = min(left[i], rates[i] * remaining)
            sent[i] += amount
            left[i] -= amount
            remaining -= amount / rates[i]
            if remaining <= 0:
                break
    return sent


class EventDrivenEngine:
    """
    Args:
        s: The scenario
        models: Mobility, connection and channel models, defaults to constant speeds, unit disks and constant rates
    """

    def __init__(self, s: Scenario, models: Optional[ModelConfig] = None):
        models = models or ModelConfig()
        self.s = s
        self.models = models
        self.mobility = build_mobility(models.mobility.name, models.mobility)
        self.connection = build_connection(models.connection.name, models.connection)
        self.channel = build_channel(models.channel.name, models.channel)

    @property
    def link_tau(self) -> Optional[float]:
        """
        Width of the slots on which shadowed links are re-evaluated, the speed-change grid under random speeds
        """
        if self.connection.tau is None:
            return None
        return getattr(self.mobility.config, "tau", None) or self.connection.tau

    def _link_intervals(
        self,
        link: LinkKind,
        time_at: Callable[[np.ndarray], np.ndarray],
        center: np.ndarray,
        stream: np.random.Generator,
    ) -> _Links:
        """
        Link-up intervals of contacts that are closest at displacement `center[k]`.

        Args:
            link: Link kind, selects the nominal range
            time_at: Maps an (n, m) array of displacements, row k belonging to contact k, to times
            center: Displacement of every contact at zero distance
            stream: Source of the range draws

        Returns:
            The intervals, ordered by contact and then by time
        """
        s = self.s
        center = np.asarray(center, dtype=float)
        n = center.size
        if n == 0:
            return _Links.empty()
        if self.connection.is_fixed:
            r = nominal_range(link, s)
            times = time_at(np.stack([center - r, center + r], axis=1))
            return _Links(np.arange(n), times[:, 0], times[:, 1])

        tau = self.link_tau
        reach = self.connection.max_radius(link, s)
        span = time_at(np.stack([center - reach, center + reach], axis=1))
        first = np.floor(span[:, 0] / tau)
        count = (np.floor(span[:, 1] / tau) - first).astype(int) + 1
        width = int(count.max())
        slot_start = (first[:, None] + np.arange(width)) * tau
        radius = np.asarray(self.connection.radius(link, s, stream, size=(n, width)), dtype=float)
        start = np.maximum(time_at(center[:, None] - radius), slot_start)
        end = np.minimum(time_at(center[:, None] + radius), slot_start + tau)
        keep = (end > start) & (np.arange(width) < count[:, None])
        owner = np.broadcast_to(np.arange(n)[:, None], keep.shape)
        return _Links(owner[keep], start[keep], end[keep])

    def _place_helpers(self, voi: Trajectory, horizon: int, streams: EventStreams) -> _HelperState:
        s = self.s
        # distance a helper and the VoI close together, as a function of time, with the helper at nominal speed
        nominal_closing = voi.offsets + s.v2 * voi.times
        t_end = float(voi.time_at(horizon * s.d + 2 * s.r_I))
        u_max = float(voi.offset_at(t_end)) + s.v2 * t_end + 2 * s.r_I
        # u is the initial distance ahead of the VoI
        u = poisson_points(s.rho2, 0.0, u_max, streams.traffic)

        trajectories = None
        if self.mobility.is_constant:
            def closing_time(x):
                return np.interp(x, nominal_closing, voi.times)
        else:
            meeting = np.interp(u, nominal_closing, voi.times)
            source = np.floor(voi.offset_at(meeting) / s.d) + 1
            # random motion starts when the helper nominally reaches the coverage edge of the infrastructure
            # before its source
            anchor = (u - s.r_I - (source + 1) * s.d - s.r_I) / s.v2
            travel = 2 * s.d + 4 * s.r_I
            trajectories = [
                self.mobility.helper_trajectory(s, a, travel, streams.helper_mobility) for a in anchor
            ]
            closing_time = _rowwise([lambda x, t=t: _meeting_times(voi, t, x) for t in trajectories])

        v2v = self._link_intervals(LinkKind.V2V, closing_time, u, streams.connection)
        start, end = v2v.first_start(u.size), v2v.last_end(u.size)
        cycle = np.full(u.size, -1)
        contacted = np.isfinite(start)
        cycle[contacted] = np.floor(voi.offset_at(start[contacted]) / s.d).astype(int)
        state = _HelperState(u, v2v, start, end, cycle, trajectories)
        return state.subset((cycle >= 0) & (cycle < horizon))

    def _helper_time_at(self, helpers: _HelperState, idx: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        if helpers.trajectories is None:
            return lambda x: np.maximum(x, 0.0) / self.s.v2
        return _rowwise([helpers.trajectories[i].time_at for i in idx])

    def _serve_v2i(self, helpers: _HelperState, voi_links: _Links, horizon: int, streams: EventStreams) -> np.ndarray:
        """
        Service at every infrastructure. Returns the bits each helper holds from its own source.
        """
        s = self.s
        buffered = np.zeros(helpers.u.size)
        source = helpers.source
        for j in range(1, horizon + 1):
            # helpers from the previous source pass I_j right before this source's helpers do
            idx = np.flatnonzero((source == j) | (source == j - 1))
            if idx.size == 0:
                continue
            links = self._link_intervals(
                LinkKind.V2I, self._helper_time_at(helpers, idx), helpers.u[idx] - s.r_I - j * s.d, streams.connection
            )
            order = np.argsort(links.first_start(idx.size), kind="stable")
            idx = idx[order]
            links = links.of(order)
            rates = np.array([
                self.channel.link_rate(LinkKind.V2I, nominal_range(LinkKind.V2I, s), s, streams.channel)
                for _ in idx
            ])

            # the VoI is contact 0 and outranks every helper
            voi = voi_links.of(np.array([j]))
            contacts = _concat(voi, links, offsets=[0, 1])
            served = _served_time(np.arange(idx.size + 1), contacts, idx.size + 1)[1:]
            bits = rates * served

            own = source[idx] == j
            buffered[idx[own]] = bits[own]
        return buffered

    def _deliver_v2v(
        self,
        helpers: _HelperState,
        buffered: np.ndarray,
        cycle: int,
        window_start: float,
        window_end: float,
        blocked: _Links,
        streams: EventStreams,
    ):
        idx = np.flatnonzero(helpers.cycle == cycle)
        idx = idx[np.argsort(helpers.contact_start[idx], kind="stable")]
        links = helpers.v2v.of(idx).clip(window_start, window_end)
        rates = np.array([
            self.channel.link_rate(LinkKind.V2V, nominal_range(LinkKind.V2V, self.s), self.s, streams.channel)
            for _ in idx
        ])
        sent = _drain_buffers(links, blocked.clip(window_start, window_end), buffered[idx], rates)

        delivered = float(sent.sum())
        available = float(buffered[idx].sum())
        if delivered > available * (1 + _LEDGER_RTOL) + _LEDGER_RTOL:
            raise EventEngineError(
                f"Cycle {cycle} delivered {delivered:.6g} bits over V2V but its helpers only received "
                f"{available:.6g} bits from the infrastructure"
            )

        clusters = 0
        reach = -np.inf
        for i in np.flatnonzero(sent > 0):
            if helpers.contact_start[idx[i]] > reach:
                clusters += 1
            reach = max(reach, helpers.contact_end[idx[i]])
        return delivered, int(idx.size), clusters

    def run(self, horizon_cycles: int, streams: EventStreams) -> List[CycleTrace]:
        """
        Simulate `horizon_cycles` cycles and return the traces of all but the first and the last one
        """
        if horizon_cycles < 3:
            raise ValueError(
                f"An event-driven run needs at least 3 cycles (first and last are discarded), got {horizon_cycles}"
            )
        s = self.s
        voi = self.mobility.voi_trajectory(s, (horizon_cycles + 1) * s.d + 4 * s.r_I, streams.voi_mobility)

        k = np.arange(horizon_cycles + 1)
        # VoI displacement x puts it at x - r_I on the road
        voi_links = self._link_intervals(LinkKind.V2I, voi.time_at, k * s.d + s.r_I, streams.connection)
        voi_rates = np.array([
            self.channel.link_rate(LinkKind.V2I, nominal_range(LinkKind.V2I, s), s, streams.channel) for _ in k
        ])
        v2i_bits = voi_rates * voi_links.up_time(k.size)
        cycle_starts = voi.time_at(k * s.d)

        helpers = self._place_helpers(voi, horizon_cycles, streams)
        buffered = self._serve_v2i(helpers, voi_links, horizon_cycles, streams)

        traces = []
        for cycle in range(1, horizon_cycles - 1):
            v2v, count, clusters = self._deliver_v2v(
                helpers, buffered, cycle, cycle_starts[cycle], cycle_starts[cycle + 1], voi_links, streams
            )
            traces.append(
                CycleTrace(
                    cycle_index=cycle,
                    duration=float(cycle_starts[cycle + 1] - cycle_starts[cycle]),
                    v2i_bits=float(v2i_bits[cycle]),
                    v2v_bits=v2v,
                    helper_count=count,
                    cluster_count=clusters,
                )
            )
        return traces


def run_event_driven(
    s: Scenario,
    models: Optional[ModelConfig],
    horizon_cycles: int,
    stream: np.random.Generator | EventStreams,
) -> List[CycleTrace]:
    """
    Simulate one event-driven replication.

    Args:
        s: The scenario
        models: Simulation models (None for the defaults)
        horizon_cycles: Cycles simulated; the first and the last are discarded
        stream: Either per-component `EventStreams` or a single generator the component streams are split from

    Returns:
        `horizon_cycles - 2` cycle traces
    """
    streams = stream if isinstance(stream, EventStreams) else EventStreams.from_stream(stream)
    return EventDrivenEngine(s, models).run(horizon_cycles, streams)
