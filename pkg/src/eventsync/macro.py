"""Derived event structures: merged macro classes and event sequences.

Both transformations produce a new :class:`~eventsync.events.EventDataset`
whose classes are the derived ones, ready for the usual synchronization
math.

Sequence detection semantics
----------------------------
A sequence spec is an ordered tuple of classes (repetitions allowed).
Within one series, a match requires strictly increasing times, each
consecutive gap at most the inter-event interval, and no event of any
class appearing in the spec strictly between two consecutive matched
elements.  The scanner is greedy left-to-right: when an event violates an
in-progress match, the match is abandoned and the violating event starts
a fresh match if it fits the first element, otherwise scanning simply
continues.  A completed match emits one macro event at the time of its
final element (so a streaming detector can emit it causally) and consumes
its events; matches never overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyMemberSetError, IndexOutOfRangeError
from .events import EventDataset, UNBOUNDED

__all__ = [
    "MacroClassSpec",
    "SequenceSpec",
    "SequenceMatcher",
    "apply_macro_classes",
    "detect_sequences",
]


@dataclass(frozen=True)
class MacroClassSpec:
    """A merged class: the union of one or more original classes."""

    members: frozenset[int]
    new_id: int

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise EmptyMemberSetError("macro class needs at least one member")


@dataclass(frozen=True)
class SequenceSpec:
    """An ordered tuple of classes detected as one macro event."""

    elements: tuple[int, ...]
    new_id: int = 0
    iei: int | None = UNBOUNDED

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(int(e) for e in self.elements))
        if len(self.elements) < 1:
            raise EmptyMemberSetError("sequence needs at least one element")


def apply_macro_classes(dataset: EventDataset,
                        specs: Sequence[MacroClassSpec]) -> EventDataset:
    """Relabel a dataset onto macro classes.

    An event of an original class appears in every macro class that
    contains it, so one event may occur in several derived classes.  Two
    member classes firing at the same time in one series collapse to a
    single derived event (the macro class records that *a* member fired).
    """
    if not specs:
        raise EmptyMemberSetError("need at least one macro class spec")
    ids = sorted(s.new_id for s in specs)
    if ids != list(range(len(specs))):
        raise IndexOutOfRangeError("macro class ids must be 0..len(specs)-1")
    for spec in specs:
        for k in spec.members:
            if not (0 <= k < dataset.n_classes):
                raise IndexOutOfRangeError(f"member class {k} not in dataset")
    times: dict[tuple[int, int], np.ndarray] = {}
    for spec in specs:
        for n in range(dataset.n_series):
            merged = np.concatenate(
                [dataset.times(n, k) for k in sorted(spec.members)])
            if merged.size:
                times[(n, spec.new_id)] = np.unique(merged)
    return EventDataset(dataset.n_series, len(specs), times)


class SequenceMatcher:
    """Incremental single-series sequence detector.

    Feed events (time-ordered) with :meth:`push`; a completed match
    returns its completion time.  State survives across stream buffers,
    and an in-progress match expires as soon as an event arrives beyond
    the inter-event interval.
    """

    def __init__(self, spec: SequenceSpec):
        self.spec = spec
        self._classes = frozenset(spec.elements)
        self._progress = 0          # number of matched elements
        self._last_time: int | None = None

    def push(self, time: int, class_id: int) -> int | None:
        """Process one event; return the completion time on a full match."""
        if class_id not in self._classes:
            return None
        iei = self.spec.iei
        if (self._progress > 0 and iei is not UNBOUNDED
                and time - self._last_time > iei):
            self._reset()
        if self._progress > 0:
            expected = self.spec.elements[self._progress]
            if class_id == expected and time > self._last_time:
                self._progress += 1
                self._last_time = time
                if self._progress == len(self.spec.elements):
                    self._reset()
                    return int(time)
                return None
            # Violation: an in-spec event that is not the expected next
            # element (or not strictly later) interrupts the match.
            self._reset()
        if class_id == self.spec.elements[0]:
            self._progress = 1
            self._last_time = time
        return None

    def _reset(self):
        self._progress = 0
        self._last_time = None


def detect_sequences(dataset: EventDataset, spec: SequenceSpec) -> EventDataset:
    """Detect a sequence per series; the result has the single derived class.

    Events of classes outside the spec never influence detection.
    """
    for k in spec.elements:
        if not (0 <= k < dataset.n_classes):
            raise IndexOutOfRangeError(f"sequence element class {k} not in dataset")
    times: dict[tuple[int, int], np.ndarray] = {}
    for n in range(dataset.n_series):
        matcher = SequenceMatcher(spec)
        stream = sorted(
            (int(t), k)
            for k in set(spec.elements)
            for t in dataset.times(n, k))
        emitted = [t for time, k in stream
                   if (t := matcher.push(time, k)) is not None]
        if emitted:
            times[(n, 0)] = np.asarray(emitted, dtype=np.int64)
    return EventDataset(dataset.n_series, 1, times)


def detect_sequence_set(dataset: EventDataset,
                        specs: Sequence[SequenceSpec]) -> EventDataset:
    """Run several sequence specs; derived class ids follow spec order."""
    if not specs:
        raise EmptyMemberSetError("need at least one sequence spec")
    times: dict[tuple[int, int], np.ndarray] = {}
    for idx, spec in enumerate(specs):
        derived = detect_sequences(dataset, spec)
        for n in range(dataset.n_series):
            tt = derived.times(n, 0)
            if tt.size:
                times[(n, idx)] = tt
    return EventDataset(dataset.n_series, len(specs), times)
