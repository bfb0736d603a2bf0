"""Shipped example datasets used by the demos, the CLI and the tests.

Three self-contained scenarios:

* ``composed_example`` -- a composed sine (dominant constant tone, a
  falling-frequency tone, smoothed noise) analyzed against a reference
  tone: windowed class-pair indices reveal which component carries the
  dominant rhythm.
* ``sequences_example`` -- two short series of three event classes where
  the ordered sequence (E1, E2, E3) is detected as a macro event and the
  macro events are synchronized across series.
* ``surrogate_example`` -- a synthetic stand-in for a multimodal
  recording: kinetic-energy peaks against respiration-phase sequences
  under fluid and impulsive movement conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .events import CoincidenceParams, EventDataset, validate_dataset
from .macro import SequenceSpec, detect_sequences
from .signals import (
    ComposedSignalConfig,
    PeakDetectorConfig,
    Signal,
    detect_peaks,
    envelope,
    rms_energy,
    synth_composed,
)

__all__ = [
    "ComposedExample",
    "SequencesExample",
    "SurrogateExample",
    "composed_example",
    "sequences_example",
    "surrogate_example",
]


@dataclass(frozen=True)
class ComposedExample:
    """Composed-signal scenario: signals, peak events and analysis setup.

    Series 0 carries the peak trains of the composite and its three
    components (classes 0..3); series 1 carries the reference-tone peaks
    (class 4).
    """

    composite: Signal
    components: dict[str, Signal]
    reference: Signal
    dataset: EventDataset
    class_names: tuple[str, ...]
    params: CoincidenceParams
    buff_dim: int
    main_period: int


def composed_example(seed: int = 7) -> ComposedExample:
    config = ComposedSignalConfig(seed=seed)
    composite, parts = synth_composed(config)
    reference = parts["main"]

    track_configs = {
        "composite": (composite, PeakDetectorConfig(0.5, 20)),
        "main": (parts["main"], PeakDetectorConfig(0.5, 20)),
        "minor": (parts["minor"], PeakDetectorConfig(0.1, 10)),
        "noise": (parts["noise"], PeakDetectorConfig(0.12, 10)),
    }
    records = []
    for class_id, (sig, det) in enumerate(track_configs.values()):
        for t in detect_peaks(sig, det):
            records.append((int(t), 0, class_id))
    for t in detect_peaks(reference, PeakDetectorConfig(0.5, 20)):
        records.append((int(t), 1, 4))
    dataset = validate_dataset(records, n_series=2, n_classes=5)
    return ComposedExample(
        composite=composite,
        components=parts,
        reference=reference,
        dataset=dataset,
        class_names=("COMPOSITE", "MAIN", "MINOR", "NOISE", "REFERENCE"),
        params=CoincidenceParams.fixed(5.0),
        buff_dim=25,
        main_period=round(1.0 / config.main_freq),
    )


@dataclass(frozen=True)
class SequencesExample:
    """Two series of three classes plus the sequence to detect in them."""

    dataset: EventDataset
    class_names: tuple[str, ...]
    spec: SequenceSpec
    params: CoincidenceParams
    buff_dim: int
    expected_macro_times: tuple[tuple[int, ...], tuple[int, ...]]

    def class_coded(self, length: int = 40) -> np.ndarray:
        """(n_series, length) array: 0 = no event, 1..3 = event class."""
        coded = np.zeros((self.dataset.n_series, length), dtype=np.int64)
        for n in range(self.dataset.n_series):
            for k in range(self.dataset.n_classes):
                coded[n, self.dataset.times(n, k)] = k + 1
        return coded


# (time, class) per series; the ordered sequence E1->E2->E3 occurs three
# times per series, with stray in-spec events between matches.
_SEQ_SERIES_0 = [(6, 0), (10, 1), (12, 2), (15, 2), (18, 1),
                 (25, 0), (26, 1), (27, 2), (28, 0), (29, 1), (30, 2), (33, 1)]
_SEQ_SERIES_1 = [(0, 0), (2, 1), (3, 2), (8, 2), (17, 1),
                 (26, 0), (28, 1), (29, 2), (31, 0), (32, 1), (33, 2)]


def sequences_example() -> SequencesExample:
    records = [(t, 0, k) for t, k in _SEQ_SERIES_0]
    records += [(t, 1, k) for t, k in _SEQ_SERIES_1]
    dataset = validate_dataset(records, n_series=2, n_classes=3)
    return SequencesExample(
        dataset=dataset,
        class_names=("E1", "E2", "E3"),
        spec=SequenceSpec(elements=(0, 1, 2), new_id=0, iei=None),
        params=CoincidenceParams.fixed(20.0),
        buff_dim=10,
        expected_macro_times=((12, 27, 30), (3, 29, 33)),
    )


@dataclass(frozen=True)
class SurrogateExample:
    """Synthetic kinetic/respiration scenario with known ground truth.

    ``dataset`` has four series (fluid kinetic, fluid respiration,
    impulsive kinetic, impulsive respiration) and three classes after
    sequence detection: kinetic peak, inhale-onset sequence, exhale-onset
    sequence.  ``conditions`` maps a condition name to its (series pair,
    class pair, occurrence count).
    """

    dataset: EventDataset
    class_names: tuple[str, ...]
    conditions: dict[str, tuple[tuple[int, int], tuple[int, int], int]]
    buff_dim: int
    iei: int
    respiration_energy: Signal
    respiration_envelope: Signal


def _burst_audio(n_frames: int, frame_len: int, burst_frames: list[int],
                 rng: np.random.Generator) -> Signal:
    """Noise-burst 'audio' whose frame energy peaks at the given frames."""
    n = n_frames * frame_len
    audio = 0.02 * rng.standard_normal(n)
    width = frame_len // 2
    for f in burst_frames:
        center = f * frame_len + frame_len // 2
        idx = np.arange(max(0, center - 3 * width),
                        min(n, center + 3 * width))
        shape = np.exp(-0.5 * ((idx - center) / width) ** 2)
        audio[idx] += shape * rng.standard_normal(idx.size) * 1.0 + shape
    return Signal(audio, rate=25.0 * frame_len)


def _bump_signal(n_frames: int, centers: list[int]) -> Signal:
    t = np.arange(n_frames, dtype=np.float64)
    x = np.zeros(n_frames)
    for c in centers:
        x += np.exp(-0.5 * ((t - c) / 2.0) ** 2)
    return Signal(x, rate=25.0)


def surrogate_example(seed: int = 11) -> SurrogateExample:
    rng = np.random.default_rng(seed)
    n_frames = 2250                     # 90 s at 25 fps
    frame_len = 192
    segment = 250                       # EQA annotation granularity
    segment_kind = ["fluid" if s % 2 == 0 else "impulsive"
                    for s in range(n_frames // segment)]

    phase_cycle = 100                   # one respiration phase per 4 s
    kin_frames = {"fluid": [], "impulsive": []}
    re_frames = {"fluid": [], "impulsive": []}
    onsets = {("fluid", "in"): [], ("fluid", "ex"): [],
              ("impulsive", "in"): [], ("impulsive", "ex"): []}

    fluid_phase_count = 0
    for cycle in range(n_frames // phase_cycle):
        start = cycle * phase_cycle + int(rng.integers(0, 5))
        kind = segment_kind[min(start // segment, len(segment_kind) - 1)]
        phase = "in" if cycle % 2 == 0 else "ex"
        onsets[(kind, phase)].append(start)
        if kind == "impulsive":
            # Energy peak right after the phase onset, kinetic peak on top.
            re = start + 3
            kin = re + 2 + int(rng.integers(0, 3))
            re_frames[kind].append(re)
            kin_frames[kind].append(kin)
        else:
            re = start + 10
            re_frames[kind].append(re)
            fluid_phase_count += 1
            if fluid_phase_count == 3:
                # One deliberate near miss: visible only at wide windows.
                kin_frames[kind].append(re + 15)
            kin_frames[kind].extend([start + 55, start + 78])

    energies = {}
    envelopes = {}
    records = []
    series_of = {("fluid", "kin"): 0, ("fluid", "resp"): 1,
                 ("impulsive", "kin"): 2, ("impulsive", "resp"): 3}
    for kind in ("fluid", "impulsive"):
        audio = _burst_audio(n_frames, frame_len, re_frames[kind], rng)
        energy = rms_energy(audio, frame_len)
        energies[kind] = energy
        envelopes[kind] = envelope(energy, 8)
        resp_series = series_of[(kind, "resp")]
        for t in detect_peaks(energy, PeakDetectorConfig(0.2, 5)):
            records.append((int(t), resp_series, 3))           # RE peak
        for t in onsets[(kind, "in")]:
            records.append((t, resp_series, 1))                # IN onset
        for t in onsets[(kind, "ex")]:
            records.append((t, resp_series, 2))                # EX onset
        kinetic = _bump_signal(n_frames, kin_frames[kind])
        kin_series = series_of[(kind, "kin")]
        for t in detect_peaks(kinetic, PeakDetectorConfig(0.3, 5)):
            records.append((int(t), kin_series, 0))            # kinetic peak

    raw = validate_dataset(records, n_series=4, n_classes=4)
    iei = 25
    seq_in = detect_sequences(raw, SequenceSpec((1, 3), iei=iei))
    seq_ex = detect_sequences(raw, SequenceSpec((2, 3), iei=iei))
    times = {}
    for n in range(4):
        if raw.count(n, 0):
            times[(n, 0)] = raw.times(n, 0)
        if seq_in.count(n, 0):
            times[(n, 1)] = seq_in.times(n, 0)
        if seq_ex.count(n, 0):
            times[(n, 2)] = seq_ex.times(n, 0)
    dataset = EventDataset(4, 3, times)

    conditions = {
        "fluid_in": ((0, 1), (0, 1), len(onsets[("fluid", "in")])),
        "fluid_ex": ((0, 1), (0, 2), len(onsets[("fluid", "ex")])),
        "impulsive_in": ((2, 3), (0, 1), len(onsets[("impulsive", "in")])),
        "impulsive_ex": ((2, 3), (0, 2), len(onsets[("impulsive", "ex")])),
    }
    return SurrogateExample(
        dataset=dataset,
        class_names=("KINETIC", "SEQ_IN", "SEQ_EX"),
        conditions=conditions,
        buff_dim=75,
        iei=iei,
        respiration_energy=energies["impulsive"],
        respiration_envelope=envelopes["impulsive"],
    )
