"""Core domain types: event datasets, window parameters, result reports.

Timestamps are integer sample indices throughout.  Keeping them integral
makes distances exact, which the rest of the library relies on for
bit-stable results (see :mod:`eventsync.sync`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DuplicateEventError,
    IndexOutOfRangeError,
    NonPositiveTauError,
)

__all__ = [
    "EventRecord",
    "EventDataset",
    "CoincidenceParams",
    "SyncReport",
    "validate_dataset",
]

UNBOUNDED = None  # sentinel for an unlimited inter-event interval


@dataclass(frozen=True)
class EventRecord:
    """One detected event.

    ``ordinal`` is the 1-based rank of the event among the events of the
    same (series, class), in time order.
    """

    time: int
    series: int
    class_id: int
    ordinal: int


class EventDataset:
    """N series x K classes of event occurrence times.

    Immutable after construction; times per (series, class) are stored as
    sorted read-only int64 arrays.  Use :func:`validate_dataset` to build
    one from raw (time, series, class) triples.
    """

    __slots__ = ("n_series", "n_classes", "_times")

    def __init__(self, n_series: int, n_classes: int,
                 times: Mapping[tuple[int, int], np.ndarray]):
        if n_series < 1 or n_classes < 1:
            raise ConfigError("need at least one series and one class")
        self.n_series = int(n_series)
        self.n_classes = int(n_classes)
        store: dict[tuple[int, int], np.ndarray] = {}
        for (series, class_id), tt in times.items():
            if not (0 <= series < n_series):
                raise IndexOutOfRangeError(f"series {series} not in [0, {n_series})")
            if not (0 <= class_id < n_classes):
                raise IndexOutOfRangeError(f"class {class_id} not in [0, {n_classes})")
            arr = np.asarray(tt, dtype=np.int64)
            if arr.size == 0:
                continue
            if arr.min() < 0:
                raise IndexOutOfRangeError("event times must be non-negative")
            if not np.all(np.diff(arr) > 0):
                arr = np.sort(arr)
                if np.any(np.diff(arr) == 0):
                    raise DuplicateEventError(
                        f"duplicate event time in series {series}, class {class_id}")
            arr = arr.copy()
            arr.setflags(write=False)
            store[(series, class_id)] = arr
        self._times = store

    _EMPTY = np.empty(0, dtype=np.int64)

    def times(self, series: int, class_id: int) -> np.ndarray:
        """Sorted event times of one (series, class); empty array if none."""
        return self._times.get((series, class_id), self._EMPTY)

    def count(self, series: int, class_id: int) -> int:
        return int(self.times(series, class_id).size)

    @property
    def counts(self) -> dict[tuple[int, int], int]:
        """Mapping (series, class) -> number of events, zero entries omitted."""
        return {key: int(v.size) for key, v in self._times.items()}

    @property
    def n_events(self) -> int:
        return sum(v.size for v in self._times.values())

    def records(self) -> Iterator[EventRecord]:
        """All events ordered by (series, class, time), with ordinals."""
        for (series, class_id) in sorted(self._times):
            for h, t in enumerate(self._times[(series, class_id)], start=1):
                yield EventRecord(int(t), series, class_id, h)

    def shifted(self, delta: int) -> "EventDataset":
        """Copy with ``delta`` added to every event time."""
        return EventDataset(self.n_series, self.n_classes,
                            {k: v + int(delta) for k, v in self._times.items()})

    def scaled(self, factor: int) -> "EventDataset":
        """Copy with every event time multiplied by a positive integer."""
        if factor < 1:
            raise ConfigError("scale factor must be a positive integer")
        return EventDataset(self.n_series, self.n_classes,
                            {k: v * int(factor) for k, v in self._times.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventDataset):
            return NotImplemented
        return (self.n_series == other.n_series
                and self.n_classes == other.n_classes
                and self._times.keys() == other._times.keys()
                and all(np.array_equal(v, other._times[k])
                        for k, v in self._times.items()))

    def __repr__(self) -> str:
        return (f"EventDataset(n_series={self.n_series}, "
                f"n_classes={self.n_classes}, n_events={self.n_events})")


def validate_dataset(raw_events: Iterable[tuple[int, int, int]],
                     n_series: int, n_classes: int) -> EventDataset:
    """Build an :class:`EventDataset` from (time, series, class) triples.

    Input order is irrelevant; events are sorted per (series, class).
    Raises :class:`DuplicateEventError` for a repeated (time, series, class),
    :class:`IndexOutOfRangeError` for indices outside the declared ranges.
    An empty input is allowed and yields an all-zero-count dataset.
    """
    buckets: dict[tuple[int, int], list[int]] = {}
    for time, series, class_id in raw_events:
        t = int(time)
        if t < 0:
            raise IndexOutOfRangeError(f"negative event time {t}")
        if not (0 <= series < n_series):
            raise IndexOutOfRangeError(f"series {series} not in [0, {n_series})")
        if not (0 <= class_id < n_classes):
            raise IndexOutOfRangeError(f"class {class_id} not in [0, {n_classes})")
        buckets.setdefault((int(series), int(class_id)), []).append(t)
    times: dict[tuple[int, int], np.ndarray] = {}
    for key, tt in buckets.items():
        tt.sort()
        arr = np.asarray(tt, dtype=np.int64)
        if np.any(np.diff(arr) == 0):
            raise DuplicateEventError(
                f"duplicate event time in series {key[0]}, class {key[1]}")
        times[key] = arr
    return EventDataset(n_series, n_classes, times)


@dataclass(frozen=True)
class CoincidenceParams:
    """Coincidence-window policy plus the sequence inter-event interval.

    ``mode`` is ``"fixed"`` or ``"adaptive"``.  Fixed windows resolve per
    class pair with precedence: explicit pair entry, then the per-class
    entries (combined with ``max`` for distinct classes), then
    ``default_tau``.  Adaptive mode derives a window per event pair from
    neighbour gaps and uses ``fallback_tau`` when no neighbour exists.

    ``iei`` is the maximum gap between consecutive elements of a detected
    sequence; ``None`` means unbounded.
    """

    mode: str = "fixed"
    tau_class: Mapping[int, float] = field(default_factory=dict)
    tau_pair: Mapping[tuple[int, int], float] = field(default_factory=dict)
    default_tau: float | None = None
    fallback_tau: float | None = None
    iei: int | None = UNBOUNDED

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ConfigError(f"unknown coincidence mode {self.mode!r}")
        for tau in self.tau_class.values():
            if tau <= 0:
                raise NonPositiveTauError(f"per-class window {tau} must be > 0")
        pairs = {}
        for (a, b), tau in self.tau_pair.items():
            if tau <= 0:
                raise NonPositiveTauError(f"pair window {tau} must be > 0")
            key = (a, b) if a <= b else (b, a)
            if pairs.get(key, tau) != tau:
                raise ConfigError(f"conflicting windows for class pair {key}")
            pairs[key] = float(tau)
        object.__setattr__(self, "tau_pair", pairs)
        if self.default_tau is not None and self.default_tau <= 0:
            raise NonPositiveTauError("default window must be > 0")
        if self.mode == "adaptive" and (self.fallback_tau is None
                                        or self.fallback_tau <= 0):
            raise NonPositiveTauError("adaptive mode needs a positive fallback_tau")
        if self.iei is not UNBOUNDED and self.iei <= 0:
            raise ConfigError("iei must be positive or unbounded")

    @classmethod
    def fixed(cls, tau: float, iei: int | None = UNBOUNDED) -> "CoincidenceParams":
        """Single window applied to every class and class pair."""
        return cls(mode="fixed", default_tau=float(tau), iei=iei)

    @classmethod
    def adaptive(cls, fallback_tau: float,
                 iei: int | None = UNBOUNDED) -> "CoincidenceParams":
        return cls(mode="adaptive", fallback_tau=float(fallback_tau), iei=iei)

    def window(self, k1: int, k2: int | None = None) -> float:
        """Fixed window for a class (or class pair); adaptive mode raises."""
        if self.mode != "fixed":
            raise ConfigError("window() is only defined for fixed mode")
        if k2 is None:
            k2 = k1
        key = (k1, k2) if k1 <= k2 else (k2, k1)
        if key in self.tau_pair:
            return self.tau_pair[key]
        if k1 == k2 and k1 in self.tau_class:
            return float(self.tau_class[k1])
        if k1 != k2 and k1 in self.tau_class and k2 in self.tau_class:
            return float(max(self.tau_class[k1], self.tau_class[k2]))
        if self.default_tau is not None:
            return self.default_tau
        raise ConfigError(f"no coincidence window configured for classes {key}")

    def max_window(self, n_classes: int,
                   pairs: Sequence[tuple[int, int]] | None = None) -> float:
        """Largest window any configured lookup can return.

        ``pairs`` limits the inter-class lookups considered (stream engines
        pass the pairs they actually evaluate).
        """
        if self.mode != "fixed":
            raise ConfigError("max_window() is only defined for fixed mode")
        taus = [self.window(k) for k in range(n_classes)]
        if pairs is None:
            pairs = [(a, b) for a in range(n_classes) for b in range(a + 1, n_classes)]
        taus += [self.window(a, b) for a, b in pairs]
        return max(taus) if taus else 0.0


@dataclass(frozen=True)
class SyncReport:
    """Synchronization indices for one dataset or one stream window.

    ``q_per_class[k]`` is the per-class index, ``q_inter`` maps unordered
    class pairs (k1 < k2) to their joint index, ``s_pairwise`` maps
    (i, j, k1, k2) with i < j and k1 <= k2 to the pairwise value, and
    ``si_global`` / ``si_weighted`` aggregate over classes.  ``buffer`` is
    the window index for streaming output, None for batch.
    """

    q_per_class: np.ndarray
    q_inter: Mapping[tuple[int, int], float]
    s_pairwise: Mapping[tuple[int, int, int, int], float]
    si_global: float
    si_weighted: float | None = None
    buffer: int | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        q = np.asarray(self.q_per_class, dtype=np.float64)
        object.__setattr__(self, "q_per_class", q)
        eps = 1e-9
        values = list(q) + list(self.q_inter.values()) + list(self.s_pairwise.values())
        values.append(self.si_global)
        if self.si_weighted is not None:
            values.append(self.si_weighted)
        for v in values:
            if not (-eps <= v <= 1.0 + eps):
                raise ValueError(f"synchronization value {v} outside [0, 1]")
        for (k1, k2) in self.q_inter:
            if k1 >= k2:
                raise ValueError("q_inter keys must be ordered class pairs k1 < k2")

    def q_inter_matrix(self) -> np.ndarray:
        """Full symmetric K x K matrix; diagonal is the per-class vector.

        Entries for pairs that were not computed are NaN.
        """
        k = self.q_per_class.size
        mat = np.full((k, k), np.nan)
        np.fill_diagonal(mat, self.q_per_class)
        for (k1, k2), v in self.q_inter.items():
            mat[k1, k2] = mat[k2, k1] = v
        return mat
