"""Buffered online evaluation of the synchronization indices.

Incoming data is a stream of fixed-size buffers, one indicator channel
per event class per series.  Each cycle prepends the carried accumulator
tail to the new buffer (the *merged* window), converts in-buffer sample
positions to absolute stream positions, fills the event-class matrix,
accumulates coincidence per (series pair, class), and emits one
self-contained windowed report.

Geometry
--------
Consecutive buffers advance the stream by ``buff_dim - n_overlapped``
samples.  The accumulator keeps ``max(0, ceil(tau_max) - n_overlapped)``
samples of history, the smallest carry-over that makes every coincident
pair (distance <= tau) visible in the window owning its later event.

Ownership
---------
Every sample position is *owned* by exactly one buffer: the first buffer
owns its full span, each later buffer owns its fresh (non-overlapped)
samples.  A cross-series event pair is counted in the buffer owning its
later event; accumulator and overlap history act as coincidence partners
only.  This makes the multiset of per-pair coincidence contributions
across all buffers identical to a batch evaluation of the concatenated
stream, with no pair counted twice.

Each report normalizes with the counts of events the window owns, and
averages each owned event's coincidence over the partner events visible
in the merged window, so a report is a self-contained windowed index.

Adaptive windows are rejected: they would need neighbour events possibly
in future buffers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    AdaptiveTauUnsupportedError,
    ConfigError,
    GeometryMismatchError,
)
from .events import CoincidenceParams, EventDataset, SyncReport
from .macro import MacroClassSpec, SequenceMatcher, SequenceSpec
from .sync import _coincidence_total, coincidence_amount, series_pairs

__all__ = [
    "BufferGeometry",
    "EventClassMatrix",
    "StreamEngine",
    "SequenceStreamSession",
    "run_stream",
    "merge_buffer_classes",
]

# Refuse accumulators beyond this many samples unless the caller raises
# the bound explicitly; keeps a typo'd tau from exhausting memory.
DEFAULT_MAX_ACC_DIM = 1 << 23

ContributionHook = Callable[[int, int, int, int, int, int, int, float], None]


@dataclass(frozen=True)
class BufferGeometry:
    """Stream window geometry.

    ``acc_dim`` is the carried history length and ``merg_dim`` the merged
    window length ``buff_dim + acc_dim``.
    """

    buff_dim: int
    n_overlapped: int
    acc_dim: int
    merg_dim: int

    def __post_init__(self):
        if self.buff_dim < 1:
            raise GeometryMismatchError("buff_dim must be >= 1")
        if not (0 <= self.n_overlapped < self.buff_dim):
            raise GeometryMismatchError(
                "n_overlapped must satisfy 0 <= n_overlapped < buff_dim")
        if self.acc_dim < 0:
            raise GeometryMismatchError("acc_dim must be >= 0")
        if self.merg_dim != self.buff_dim + self.acc_dim:
            raise GeometryMismatchError("merg_dim must equal buff_dim + acc_dim")

    @classmethod
    def for_window(cls, buff_dim: int, n_overlapped: int,
                   tau_max: float) -> "BufferGeometry":
        """Geometry with the smallest accumulator covering ``tau_max``."""
        acc_dim = max(0, math.ceil(tau_max) - n_overlapped)
        return cls(buff_dim=buff_dim, n_overlapped=n_overlapped,
                   acc_dim=acc_dim, merg_dim=buff_dim + acc_dim)

    @property
    def step(self) -> int:
        """Stream advancement per buffer."""
        return self.buff_dim - self.n_overlapped


class EventClassMatrix:
    """Absolute event positions per (class, series) for one merged window."""

    def __init__(self, n_classes: int, n_series: int):
        self._pos: dict[tuple[int, int], np.ndarray] = {}
        self.n_classes = n_classes
        self.n_series = n_series

    _EMPTY = np.empty(0, dtype=np.int64)

    def put(self, class_id: int, series: int, positions: np.ndarray):
        self._pos[(class_id, series)] = positions

    def positions(self, class_id: int, series: int) -> np.ndarray:
        return self._pos.get((class_id, series), self._EMPTY)


class StreamEngine:
    """Sequential push-based evaluator; one report per pushed buffer.

    ``class_pairs`` selects the inter-class indices to compute per window
    (``"all"`` for every pair, or an explicit list); intra-class indices
    are always computed.  ``contribution_hook`` receives every counted
    pair as (buffer, i, j, k_i, k_j, t_i, t_j, c) and exists for audits.
    """

    def __init__(self, n_series: int, n_classes: int,
                 params: CoincidenceParams, buff_dim: int,
                 n_overlapped: int = 0,
                 class_pairs: str | Sequence[tuple[int, int]] | None = None,
                 max_acc_dim: int = DEFAULT_MAX_ACC_DIM,
                 contribution_hook: ContributionHook | None = None):
        if n_series < 2:
            raise ConfigError("streaming needs at least two series")
        if params.mode != "fixed":
            raise AdaptiveTauUnsupportedError(
                "streaming requires fixed coincidence windows")
        self.n_series = n_series
        self.n_classes = n_classes
        self.params = params
        if class_pairs == "all":
            pairs = [(a, b) for a in range(n_classes)
                     for b in range(a + 1, n_classes)]
        else:
            pairs = [tuple(sorted(p)) for p in (class_pairs or [])]
            for a, b in pairs:
                if a == b or not (0 <= a < n_classes and 0 <= b < n_classes):
                    raise ConfigError(f"bad inter-class pair ({a}, {b})")
        self.class_pairs = pairs
        tau_max = params.max_window(n_classes, pairs)
        self.geometry = BufferGeometry.for_window(buff_dim, n_overlapped, tau_max)
        if self.geometry.acc_dim > max_acc_dim:
            raise GeometryMismatchError(
                f"accumulator of {self.geometry.acc_dim} samples exceeds the "
                f"configured bound {max_acc_dim}")
        self.n_buffers = 0
        self._acc: dict[tuple[int, int], np.ndarray] = {}
        self.last_ecm: EventClassMatrix | None = None
        self._hook = contribution_hook

    # -- per-cycle helpers -------------------------------------------------

    def _fill_ecm(self, buffer: np.ndarray, start: int) -> EventClassMatrix:
        ecm = EventClassMatrix(self.n_classes, self.n_series)
        for k in range(self.n_classes):
            for n in range(self.n_series):
                rel = np.flatnonzero(buffer[k, n])
                fresh = rel.astype(np.int64) + start
                carried = self._acc.get((k, n))
                if carried is not None and carried.size:
                    ecm.put(k, n, np.concatenate((carried, fresh)))
                else:
                    ecm.put(k, n, fresh)
        return ecm

    def _emit_pairs(self, buf_idx: int, i: int, j: int, k_i: int, k_j: int,
                    vis_i: np.ndarray, own_i: int,
                    vis_j: np.ndarray, own_j: int, tau: float):
        for xi, x in enumerate(vis_i):
            for yi, y in enumerate(vis_j):
                if xi < own_i and yi < own_j:
                    continue
                c = coincidence_amount(abs(int(x) - int(y)), tau)
                if c > 0.0:
                    self._hook(buf_idx, i, j, k_i, k_j, int(x), int(y), c)

    def _directed_value(self, buf_idx: int, i: int, j: int, k_i: int, k_j: int,
                        ecm: EventClassMatrix,
                        owned_from: dict[tuple[int, int], int],
                        m_owned: dict[tuple[int, int], int]) -> float:
        """Windowed pairwise value for slots (series i, k_i) / (series j, k_j).

        Each direction sums the owned events' coincidence averaged over the
        partners visible in the merged window; history events only ever sit
        on the partner side.  A pair of history events belongs to the
        window that owned them and contributes nothing here.
        """
        vis_i = ecm.positions(k_i, i)
        vis_j = ecm.positions(k_j, j)
        own_i = owned_from[(k_i, i)]
        own_j = owned_from[(k_j, j)]
        m_i = m_owned[(k_i, i)]
        m_j = m_owned[(k_j, j)]
        if m_i + m_j == 0:
            return 0.0
        tau = self.params.window(k_i, k_j)
        if self._hook is not None:
            self._emit_pairs(buf_idx, i, j, k_i, k_j,
                             vis_i, own_i, vis_j, own_j, tau)
        c_ij = (_coincidence_total(vis_i[own_i:], vis_j, tau) / vis_j.size
                if vis_j.size else 0.0)
        c_ji = (_coincidence_total(vis_j[own_j:], vis_i, tau) / vis_i.size
                if vis_i.size else 0.0)
        return (c_ij + c_ji) / (m_i + m_j)

    # -- public API --------------------------------------------------------

    def push(self, buffer: np.ndarray) -> SyncReport:
        """Process one (K, N, buff_dim) indicator buffer; nonzero = event."""
        buffer = np.asarray(buffer)
        expected = (self.n_classes, self.n_series, self.geometry.buff_dim)
        if buffer.shape != expected:
            raise GeometryMismatchError(
                f"buffer shape {buffer.shape} != expected {expected}")
        geo = self.geometry
        buf_idx = self.n_buffers
        start = buf_idx * geo.step
        owned_start = start + (geo.n_overlapped if buf_idx > 0 else 0)

        ecm = self._fill_ecm(buffer, start)
        owned_from: dict[tuple[int, int], int] = {}
        m_owned: dict[tuple[int, int], int] = {}
        for k in range(self.n_classes):
            for n in range(self.n_series):
                pos = ecm.positions(k, n)
                split = int(np.searchsorted(pos, owned_start, side="left"))
                owned_from[(k, n)] = split
                m_owned[(k, n)] = int(pos.size - split)

        pairs = series_pairs(self.n_series)
        class_jobs = [(k, k) for k in range(self.n_classes)] + self.class_pairs
        s_pairwise: dict[tuple[int, int, int, int], float] = {}
        q_acc: dict[tuple[int, int], float] = {}
        for k1, k2 in class_jobs:
            acc = 0.0
            for i, j in pairs:
                s = self._directed_value(buf_idx, i, j, k1, k2, ecm,
                                         owned_from, m_owned)
                if k1 != k2:
                    s_rev = self._directed_value(buf_idx, i, j, k2, k1, ecm,
                                                 owned_from, m_owned)
                    s = 0.5 * (s + s_rev)
                s_pairwise[(i, j, k1, k2)] = s
                acc += s
            q_acc[(k1, k2)] = acc / len(pairs)

        # Carry the history the next merged window needs.
        next_start = (buf_idx + 1) * geo.step
        keep_from = next_start - geo.acc_dim
        acc_next: dict[tuple[int, int], np.ndarray] = {}
        for k in range(self.n_classes):
            for n in range(self.n_series):
                pos = ecm.positions(k, n)
                lo = np.searchsorted(pos, keep_from, side="left")
                hi = np.searchsorted(pos, next_start, side="left")
                if hi > lo:
                    acc_next[(k, n)] = pos[lo:hi]
        self._acc = acc_next
        self.last_ecm = ecm
        self.n_buffers += 1

        q_per_class = np.array([q_acc[(k, k)] for k in range(self.n_classes)])
        q_inter = {key: v for key, v in q_acc.items() if key[0] < key[1]}
        si = float(q_per_class.mean()) if q_per_class.size else 0.0
        return SyncReport(q_per_class=q_per_class, q_inter=q_inter,
                          s_pairwise=s_pairwise, si_global=si, buffer=buf_idx)


def run_stream(buffers: Iterable[np.ndarray], n_series: int, n_classes: int,
               params: CoincidenceParams, buff_dim: int,
               n_overlapped: int = 0, **kwargs) -> list[SyncReport]:
    """Push every buffer through a fresh engine; one report per buffer."""
    engine = StreamEngine(n_series, n_classes, params, buff_dim,
                          n_overlapped, **kwargs)
    return [engine.push(b) for b in buffers]


def dataset_to_buffers(dataset: EventDataset, buff_dim: int,
                       n_overlapped: int = 0,
                       duration: int | None = None) -> Iterable[np.ndarray]:
    """Chop a dataset into (K, N, buff_dim) indicator buffers.

    With overlap, shared samples are re-delivered in consecutive buffers,
    exactly as a windowed source would.  ``duration`` defaults to just
    covering the last event.
    """
    step = buff_dim - n_overlapped
    if step < 1:
        raise GeometryMismatchError("n_overlapped must be < buff_dim")
    if duration is None:
        last = max((int(dataset.times(n, k)[-1])
                    for n in range(dataset.n_series)
                    for k in range(dataset.n_classes)
                    if dataset.count(n, k)), default=-1)
        duration = last + 1
    n_buffers = 1
    if duration > buff_dim:
        n_buffers = 1 + math.ceil((duration - buff_dim) / step)
    for b in range(n_buffers):
        start = b * step
        buf = np.zeros((dataset.n_classes, dataset.n_series, buff_dim),
                       dtype=bool)
        for k in range(dataset.n_classes):
            for n in range(dataset.n_series):
                pos = dataset.times(n, k)
                lo = np.searchsorted(pos, start, side="left")
                hi = np.searchsorted(pos, start + buff_dim, side="left")
                buf[k, n, pos[lo:hi] - start] = True
        yield buf


def merge_buffer_classes(buffer: np.ndarray,
                         specs: Sequence[MacroClassSpec]) -> np.ndarray:
    """Relabel a (K, N, B) indicator buffer onto macro-class channels."""
    if not specs:
        raise ConfigError("need at least one macro class spec")
    out = np.zeros((len(specs),) + buffer.shape[1:], dtype=bool)
    for spec in specs:
        for k in spec.members:
            out[spec.new_id] |= buffer[k] != 0
    return out


class SequenceStreamSession:
    """Online sequence detection feeding a stream engine.

    Raw classed buffers come in; each series runs one incremental matcher
    per sequence spec, completed macro events are emitted at their
    completion sample, and the derived indicator buffers drive an inner
    engine whose classes are the sequences.  Requires non-overlapping
    buffers: overlapped buffers would re-deliver samples to the matchers.
    """

    def __init__(self, n_series: int, n_raw_classes: int,
                 specs: Sequence[SequenceSpec], params: CoincidenceParams,
                 buff_dim: int, n_overlapped: int = 0, **kwargs):
        if n_overlapped != 0:
            raise ConfigError(
                "sequence detection in streaming requires n_overlapped == 0")
        if not specs:
            raise ConfigError("need at least one sequence spec")
        self.n_raw_classes = n_raw_classes
        self.specs = list(specs)
        self._matchers = [[SequenceMatcher(spec) for spec in self.specs]
                          for _ in range(n_series)]
        self.engine = StreamEngine(n_series, len(self.specs), params,
                                   buff_dim, 0, **kwargs)

    def push(self, buffer: np.ndarray) -> SyncReport:
        buffer = np.asarray(buffer)
        geo = self.engine.geometry
        expected = (self.n_raw_classes, self.engine.n_series, geo.buff_dim)
        if buffer.shape != expected:
            raise GeometryMismatchError(
                f"buffer shape {buffer.shape} != expected {expected}")
        start = self.engine.n_buffers * geo.step
        derived = np.zeros((len(self.specs),) + buffer.shape[1:], dtype=bool)
        for n in range(self.engine.n_series):
            # All events of this series in (time, class) order.
            hits = np.argwhere(buffer[:, n, :].T != 0)  # rows (rel, class)
            for rel, k in hits:
                for s_idx, matcher in enumerate(self._matchers[n]):
                    done = matcher.push(start + int(rel), int(k))
                    if done is not None:
                        derived[s_idx, n, int(rel)] = True
        return self.engine.push(derived)
