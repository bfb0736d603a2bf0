"""Batch synchronization mathematics.

Coincidence between two events decays linearly from 1 at distance zero to
0 at the window edge.  Per-event contributions are averaged over the
partner train, summed per train, and normalized by the combined event
count; per-class and class-pair indices are means over all series pairs.
A classical two-series event-synchronization measure is included as a
baseline for comparison.

Conventions that the equations alone do not fix:

* Empty partner train: the per-event average is undefined when the
  partner train is empty, so the overall coincidence is defined as 0; a
  pair of empty trains has pairwise synchronization 0.  Absent events
  carry no evidence of synchrony.
* Class-pair index: the pairwise value couples (series, class) slots, so
  an unordered series pair admits two role assignments when the classes
  differ.  ``class_sync`` averages both assignments, which keeps the
  class-pair index symmetric and reduces exactly to the intra-class index
  for equal classes.
* Per-event averaging caps the index for m perfectly matched, mutually
  distant events at 1/m.  Reports flag pairs sitting at that ceiling.

All arithmetic is float64; timestamps stay integral until distances are
formed, so shifting all times (or scaling times and windows together by
one integer) leaves every result bit-identical.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    NoEventsError,
    NonPositiveTauError,
    TooFewSeriesError,
    ZeroWeightSumError,
)
from .events import CoincidenceParams, EventDataset, EventRecord, SyncReport

__all__ = [
    "temporal_distance",
    "coincidence_amount",
    "adaptive_tau",
    "overall_coincidence",
    "pairwise_sync",
    "class_sync",
    "global_sync",
    "analyze",
    "quiroga_es",
    "series_pairs",
]

# Row-block size for the pair-matrix kernels; keeps temporaries cache-sized.
_BLOCK = 256


def series_pairs(n_series: int) -> list[tuple[int, int]]:
    """All 2-combinations (i, j) with i < j; cardinality N(N-1)/2."""
    return list(itertools.combinations(range(n_series), 2))


def temporal_distance(tx: int, ty: int) -> int:
    """Absolute distance |tx - ty| between two event times."""
    return abs(int(tx) - int(ty))


def coincidence_amount(d: float, tau: float) -> float:
    """Linear coincidence weight: 1 - d/tau inside the window, else 0."""
    if tau <= 0:
        raise NonPositiveTauError(f"window {tau} must be > 0")
    c = 1.0 - d / tau
    return c if c > 0.0 else 0.0


def adaptive_tau(x: EventRecord, y: EventRecord, dataset: EventDataset,
                 fallback: float) -> float:
    """Per-pair window: half the smallest neighbour gap around x and y.

    Gaps whose neighbour does not exist are ignored; if neither event has
    any neighbour the ``fallback`` window is returned.
    """
    best = np.inf
    for ev in (x, y):
        train = dataset.times(ev.series, ev.class_id)
        idx = ev.ordinal - 1
        if idx + 1 < train.size:
            best = min(best, float(train[idx + 1] - train[idx]))
        if idx - 1 >= 0:
            best = min(best, float(train[idx] - train[idx - 1]))
    return 0.5 * best if np.isfinite(best) else float(fallback)


def _half_min_gaps(times: np.ndarray) -> np.ndarray:
    """Per event: min of the two neighbour gaps (inf where missing)."""
    gaps = np.diff(times).astype(np.float64)
    prev_gap = np.concatenate(([np.inf], gaps))
    next_gap = np.concatenate((gaps, [np.inf]))
    return np.minimum(prev_gap, next_gap)


def _coincidence_total(tx: np.ndarray, ty: np.ndarray, tau: float) -> float:
    """Sum of coincidence amounts over all cross pairs, fixed window.

    Blocked full pair evaluation; element arithmetic is exactly
    1 - d/tau clamped at zero, matching :func:`coincidence_amount`.
    """
    if tx.size == 0 or ty.size == 0:
        return 0.0
    y = ty.astype(np.float64)
    total = 0.0
    buf = np.empty((min(_BLOCK, tx.size), y.size))
    for start in range(0, tx.size, _BLOCK):
        xb = tx[start:start + _BLOCK].astype(np.float64)
        b = buf[:xb.size]
        np.subtract(xb[:, None], y[None, :], out=b)
        np.abs(b, out=b)
        b /= tau
        np.subtract(1.0, b, out=b)
        np.clip(b, 0.0, None, out=b)
        total += float(b.sum())
    return total


def _coincidence_total_adaptive(tx: np.ndarray, ty: np.ndarray,
                                gx: np.ndarray, gy: np.ndarray,
                                fallback: float) -> float:
    """Adaptive-window variant; gx/gy are per-event minimum neighbour gaps."""
    if tx.size == 0 or ty.size == 0:
        return 0.0
    y = ty.astype(np.float64)
    total = 0.0
    for start in range(0, tx.size, _BLOCK):
        xb = tx[start:start + _BLOCK].astype(np.float64)
        gxb = gx[start:start + _BLOCK]
        tau = np.minimum(gxb[:, None], gy[None, :]) * 0.5
        tau[~np.isfinite(tau)] = fallback
        d = np.abs(xb[:, None] - y[None, :])
        c = 1.0 - d / tau
        np.clip(c, 0.0, None, out=c)
        total += float(c.sum())
    return total


def _pair_total(dataset: EventDataset, i: int, j: int, k1: int, k2: int,
                params: CoincidenceParams) -> float:
    """Total coincidence between (i, k1) and (j, k2); symmetric in slots."""
    tx = dataset.times(i, k1)
    ty = dataset.times(j, k2)
    if params.mode == "adaptive":
        return _coincidence_total_adaptive(
            tx, ty, _half_min_gaps(tx), _half_min_gaps(ty), params.fallback_tau)
    return _coincidence_total(tx, ty, params.window(k1, k2))


def overall_coincidence(dataset: EventDataset, i: int, j: int,
                        k1: int, k2: int, params: CoincidenceParams) -> float:
    """Overall coincidence of (series i, class k1) against (series j, k2).

    Each event of (i, k1) contributes its coincidence averaged over the
    (j, k2) train; the contributions are summed.  Defined as 0 when either
    side is empty.
    """
    m_j = dataset.count(j, k2)
    if m_j == 0 or dataset.count(i, k1) == 0:
        return 0.0
    return _pair_total(dataset, i, j, k1, k2, params) / m_j


def pairwise_sync(dataset: EventDataset, i: int, j: int,
                  k1: int, k2: int, params: CoincidenceParams) -> float:
    """Pairwise synchronization of (i, k1) with (j, k2), in [0, 1].

    Sum of the two directed overall coincidences over the combined event
    count.  Invariant under exchanging (i, k1) with (j, k2).  Defined as 0
    when both trains are empty.
    """
    m_i = dataset.count(i, k1)
    m_j = dataset.count(j, k2)
    if m_i + m_j == 0:
        return 0.0
    total = _pair_total(dataset, i, j, k1, k2, params)
    c_ij = total / m_j if m_j else 0.0
    c_ji = total / m_i if m_i else 0.0
    return (c_ij + c_ji) / (m_i + m_j)


def _pair_value(dataset: EventDataset, i: int, j: int, k1: int, k2: int,
                params: CoincidenceParams) -> float:
    """Role-symmetrized pairwise value for an unordered series pair."""
    if k1 == k2:
        return pairwise_sync(dataset, i, j, k1, k2, params)
    return 0.5 * (pairwise_sync(dataset, i, j, k1, k2, params)
                  + pairwise_sync(dataset, i, j, k2, k1, params))


def class_sync(dataset: EventDataset, k1: int, k2: int,
               params: CoincidenceParams) -> float:
    """Per-class (k1 == k2) or class-pair index: mean pairwise value over
    all series pairs.  Pairs without events contribute 0."""
    if dataset.n_series < 2:
        raise TooFewSeriesError("class_sync needs at least two series")
    pairs = series_pairs(dataset.n_series)
    acc = 0.0
    for i, j in pairs:
        acc += _pair_value(dataset, i, j, k1, k2, params)
    return acc / len(pairs)


def global_sync(q: Sequence[float],
                weights: Sequence[float] | None = None) -> float:
    """Aggregate per-class indices into one scalar.

    Unweighted: arithmetic mean.  Weighted: sum of W_k * Q_k normalized by
    the weight sum, which keeps the result in [0, 1].
    """
    q = np.asarray(q, dtype=np.float64)
    if q.size == 0:
        raise NoEventsError("empty index vector")
    if weights is None:
        return float(q.mean())
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != q.shape:
        raise ZeroWeightSumError(
            f"weight vector length {w.size} != class count {q.size}")
    if np.any(w < 0):
        raise ZeroWeightSumError("weights must be non-negative")
    total = w.sum()
    if total == 0:
        raise ZeroWeightSumError("weights must not all be zero")
    return float((w * q).sum() / total)


def _dilution_notes(dataset: EventDataset,
                    s_pairwise: dict[tuple[int, int, int, int], float],
                    limit: int = 8) -> tuple[str, ...]:
    """Flag pairs whose value sits exactly at the 1/m averaging ceiling."""
    notes = []
    for (i, j, k1, k2), s in s_pairwise.items():
        if k1 != k2 or s <= 0.0:
            continue
        m = dataset.count(i, k1)
        if m > 1 and m == dataset.count(j, k1) and abs(s - 1.0 / m) < 1e-12:
            notes.append(
                f"series pair ({i},{j}) class {k1}: value at the 1/m "
                f"one-to-one averaging ceiling (m={m})")
            if len(notes) >= limit:
                break
    return tuple(notes)


def analyze(dataset: EventDataset, params: CoincidenceParams,
            weights: Sequence[float] | None = None,
            include_inter: bool = True,
            annotate: bool = True) -> SyncReport:
    """Full batch report: per-class vector, class-pair matrix, pairwise
    values, and the global index (weighted variant when weights given)."""
    if dataset.n_series < 2:
        raise TooFewSeriesError("analysis needs at least two series")
    n_k = dataset.n_classes
    pairs = series_pairs(dataset.n_series)
    class_jobs = [(k, k) for k in range(n_k)]
    if include_inter:
        class_jobs += [(a, b) for a in range(n_k) for b in range(a + 1, n_k)]

    s_pairwise: dict[tuple[int, int, int, int], float] = {}
    q_acc: dict[tuple[int, int], float] = {}
    for k1, k2 in class_jobs:
        acc = 0.0
        for i, j in pairs:
            s = _pair_value(dataset, i, j, k1, k2, params)
            s_pairwise[(i, j, k1, k2)] = s
            acc += s
        q_acc[(k1, k2)] = acc / len(pairs)

    q_per_class = np.array([q_acc[(k, k)] for k in range(n_k)])
    q_inter = {key: v for key, v in q_acc.items() if key[0] < key[1]}
    si = global_sync(q_per_class)
    si_w = global_sync(q_per_class, weights) if weights is not None else None
    notes = _dilution_notes(dataset, s_pairwise) if annotate else ()
    return SyncReport(q_per_class=q_per_class, q_inter=q_inter,
                      s_pairwise=s_pairwise, si_global=si, si_weighted=si_w,
                      notes=notes)


def quiroga_es(x_times: Sequence[int], y_times: Sequence[int],
               tau: float) -> float:
    """Classical two-series event synchronization (Quiroga-style baseline).

    Counts, for each direction, event pairs where one event follows the
    other within (0, tau], ties counting one half each, and normalizes by
    the geometric mean of the event counts.  Unlike the class-based
    indices this quantity is not bounded by 1.
    """
    if tau <= 0:
        raise NonPositiveTauError(f"window {tau} must be > 0")
    tx = np.asarray(x_times, dtype=np.int64)
    ty = np.asarray(y_times, dtype=np.int64)
    if tx.size == 0 or ty.size == 0:
        raise NoEventsError("baseline needs events in both series")
    diff = tx[:, None] - ty[None, :]
    c_x_after_y = np.count_nonzero((diff > 0) & (diff <= tau))
    c_y_after_x = np.count_nonzero((-diff > 0) & (-diff <= tau))
    ties = np.count_nonzero(diff == 0)
    c_xy = c_x_after_y + 0.5 * ties
    c_yx = c_y_after_x + 0.5 * ties
    return float((c_yx + c_xy) / np.sqrt(tx.size * ty.size))


def iter_pair_contributions(dataset: EventDataset, i: int, j: int,
                            k1: int, k2: int, params: CoincidenceParams
                            ) -> Iterator[tuple[int, int, float]]:
    """Yield (t_x, t_y, c) for every coincident cross pair, c > 0.

    Scalar path sharing :func:`coincidence_amount`; used to audit the
    vectorized kernels and the stream engine.
    """
    tx = dataset.times(i, k1)
    ty = dataset.times(j, k2)
    for xi, x in enumerate(tx):
        for yi, y in enumerate(ty):
            d = temporal_distance(x, y)
            if params.mode == "adaptive":
                tau = adaptive_tau(EventRecord(int(x), i, k1, xi + 1),
                                   EventRecord(int(y), j, k2, yi + 1),
                                   dataset, params.fallback_tau)
            else:
                tau = params.window(k1, k2)
            c = coincidence_amount(d, tau)
            if c > 0.0:
                yield int(x), int(y), c
