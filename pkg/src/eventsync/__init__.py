"""Synchronization analysis for classed event streams.

Measures how synchronized discrete events are across multiple time
series, where every event belongs to a class.  Provides per-class and
class-pair indices, global aggregates, derived macro classes and event
sequences, a buffered streaming engine, and a classical two-series
baseline for comparison.
"""

from .errors import (
    AdaptiveTauUnsupportedError,
    ConfigError,
    DataFormatError,
    DuplicateEventError,
    EmptyMemberSetError,
    EventSyncError,
    GeometryMismatchError,
    IndexOutOfRangeError,
    NoEventsError,
    NonPositiveTauError,
    TooFewSeriesError,
    ZeroOccurrencesError,
    ZeroWeightSumError,
)
from .events import (
    CoincidenceParams,
    EventDataset,
    EventRecord,
    SyncReport,
    validate_dataset,
)
from .macro import (
    MacroClassSpec,
    SequenceSpec,
    apply_macro_classes,
    detect_sequences,
)
from .signals import (
    PeakDetectorConfig,
    Signal,
    detect_peaks,
    envelope,
    rms_energy,
    synth_composed,
    threshold_sync_score,
)
from .streaming import (
    BufferGeometry,
    SequenceStreamSession,
    StreamEngine,
    dataset_to_buffers,
    run_stream,
)
from .sync import (
    adaptive_tau,
    analyze,
    class_sync,
    coincidence_amount,
    global_sync,
    overall_coincidence,
    pairwise_sync,
    quiroga_es,
    series_pairs,
    temporal_distance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # events
    "EventRecord", "EventDataset", "CoincidenceParams", "SyncReport",
    "validate_dataset",
    # core math
    "temporal_distance", "coincidence_amount", "adaptive_tau",
    "overall_coincidence", "pairwise_sync", "class_sync", "global_sync",
    "analyze", "quiroga_es", "series_pairs",
    # macro structures
    "MacroClassSpec", "SequenceSpec", "apply_macro_classes",
    "detect_sequences",
    # streaming
    "BufferGeometry", "StreamEngine", "SequenceStreamSession",
    "run_stream", "dataset_to_buffers",
    # signals
    "Signal", "PeakDetectorConfig", "detect_peaks", "rms_energy",
    "envelope", "synth_composed", "threshold_sync_score",
    # errors
    "EventSyncError", "DuplicateEventError", "IndexOutOfRangeError",
    "NonPositiveTauError", "TooFewSeriesError", "ZeroWeightSumError",
    "NoEventsError", "EmptyMemberSetError", "GeometryMismatchError",
    "AdaptiveTauUnsupportedError", "ZeroOccurrencesError", "ConfigError",
    "DataFormatError",
]
