"""File formats and run configuration.

Formats (all CSV with a header row):

* events: ``time,series,class`` -- integer sample time, integer series
  index, class name.
* signals: ``sample,value`` -- one column of samples.
* reports: ``metric,pair,class_a,class_b,buffer,value`` -- long format so
  any number of classes and series fits one schema.  ``buffer`` is empty
  for batch output.

The run configuration is an INI-style file; values can be overridden by
CLI flags.  Coincidence windows accept three key forms in the
``[coincidence]`` section: ``tau`` (global), ``tau.<class>`` and
``tau.<class_a>.<class_b>``.
"""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataFormatError
from .events import CoincidenceParams, EventDataset, SyncReport, validate_dataset
from .macro import MacroClassSpec, SequenceSpec
from .signals import Signal

__all__ = [
    "RunConfig",
    "parse_config",
    "read_events_csv",
    "write_events_csv",
    "read_signal_csv",
    "write_signal_csv",
    "write_reports_csv",
    "class_coded_to_records",
]


@dataclass
class RunConfig:
    """Everything a CLI run needs besides the data files."""

    n_series: int
    class_names: tuple[str, ...]
    params: CoincidenceParams
    weights: np.ndarray | None = None
    macro_specs: list[MacroClassSpec] = field(default_factory=list)
    macro_names: tuple[str, ...] = ()
    sequence_specs: list[SequenceSpec] = field(default_factory=list)
    sequence_names: tuple[str, ...] = ()
    buff_dim: int | None = None
    n_overlapped: int = 0

    def __post_init__(self):
        if self.n_series < 1:
            raise ConfigError("series count must be >= 1")
        if len(set(self.class_names)) != len(self.class_names):
            raise ConfigError("class names must be unique")
        for name in self.class_names:
            if "." in name or "," in name or not name:
                raise ConfigError(f"bad class name {name!r}")
        if self.macro_specs and self.sequence_specs:
            raise ConfigError(
                "macro classes and sequences cannot be combined in one run")

    def class_id(self, name: str) -> int:
        try:
            return self.class_names.index(name)
        except ValueError:
            raise ConfigError(f"unknown class name {name!r}") from None

    @property
    def derived_class_names(self) -> tuple[str, ...]:
        """Class names after macro/sequence preprocessing."""
        if self.macro_specs:
            return self.macro_names
        if self.sequence_specs:
            return self.sequence_names
        return self.class_names


def _parse_iei(text: str) -> int | None:
    if text.strip().lower() in ("inf", "unbounded", "none"):
        return None
    value = int(text)
    if value <= 0:
        raise ConfigError("iei must be positive or 'inf'")
    return value


def parse_config(path: str | Path,
                 tau: float | None = None,
                 iei: str | None = None,
                 buff_dim: int | None = None,
                 n_overlapped: int | None = None) -> RunConfig:
    """Load a RunConfig from an INI file; keyword arguments override.

    When macro or sequence sections are present the analysis runs on the
    derived classes, so window and weight keys resolve against the
    derived names; otherwise against the raw class names.
    """
    cp = configparser.ConfigParser()
    cp.optionxform = str  # class names are case sensitive
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "dataset" not in cp:
        raise ConfigError("config needs a [dataset] section")
    ds = cp["dataset"]
    try:
        n_series = int(ds.get("series", ""))
    except ValueError:
        raise ConfigError("[dataset] series must be an integer") from None
    class_names = tuple(s.strip() for s in ds.get("classes", "").split(",")
                        if s.strip())
    if not class_names:
        raise ConfigError("[dataset] classes must list at least one name")
    raw_ids = {name: k for k, name in enumerate(class_names)}

    co = cp["coincidence"] if "coincidence" in cp else {}
    iei_value = _parse_iei(iei if iei is not None else co.get("iei", "inf"))

    macro_specs: list[MacroClassSpec] = []
    macro_names: list[str] = []
    sequence_specs: list[SequenceSpec] = []
    sequence_names: list[str] = []
    for section in cp.sections():
        if section.startswith("macro."):
            members = [_class_id(raw_ids, s.strip(), section)
                       for s in cp[section].get("members", "").split(",")
                       if s.strip()]
            macro_specs.append(MacroClassSpec(frozenset(members),
                                              new_id=len(macro_specs)))
            macro_names.append(section.split(".", 1)[1])
        elif section.startswith("sequence."):
            elements = [_class_id(raw_ids, s.strip(), section)
                        for s in cp[section].get("elements", "").split(",")
                        if s.strip()]
            sequence_specs.append(SequenceSpec(tuple(elements),
                                               new_id=len(sequence_specs),
                                               iei=iei_value))
            sequence_names.append(section.split(".", 1)[1])

    # Windows and weights describe the classes being analyzed.
    active_names = tuple(macro_names) or tuple(sequence_names) or class_names
    active_ids = {name: k for k, name in enumerate(active_names)}

    mode = co.get("mode", "fixed").strip() if co else "fixed"
    tau_class: dict[int, float] = {}
    tau_pair: dict[tuple[int, int], float] = {}
    default_tau = None
    for key, value in co.items():
        if key == "tau":
            default_tau = float(value)
        elif key.startswith("tau."):
            parts = key.split(".")[1:]
            ids = [_class_id(active_ids, p, "coincidence") for p in parts]
            if len(ids) == 1:
                tau_class[ids[0]] = float(value)
            elif len(ids) == 2:
                tau_pair[(ids[0], ids[1])] = float(value)
            else:
                raise ConfigError(f"bad window key {key!r}")
    if tau is not None:
        default_tau = float(tau)
    fallback = co.get("fallback_tau") if co else None
    params = CoincidenceParams(
        mode=mode, tau_class=tau_class, tau_pair=tau_pair,
        default_tau=default_tau,
        fallback_tau=float(fallback) if fallback else None,
        iei=iei_value)

    weights = None
    if "weights" in cp:
        w = np.zeros(len(active_names))
        for name, value in cp["weights"].items():
            w[_class_id(active_ids, name, "weights")] = float(value)
        weights = w

    stream = cp["stream"] if "stream" in cp else {}
    cfg_buff = stream.get("buff_dim") if stream else None
    cfg_over = stream.get("n_overlapped", "0") if stream else "0"
    return RunConfig(
        n_series=n_series,
        class_names=class_names,
        params=params,
        weights=weights,
        macro_specs=macro_specs,
        macro_names=tuple(macro_names),
        sequence_specs=sequence_specs,
        sequence_names=tuple(sequence_names),
        buff_dim=buff_dim if buff_dim is not None
                 else int(cfg_buff) if cfg_buff else None,
        n_overlapped=n_overlapped if n_overlapped is not None
                     else int(cfg_over))


def _class_id(name_to_id: dict[str, int], name: str, section: str) -> int:
    try:
        return name_to_id[name]
    except KeyError:
        raise ConfigError(f"unknown class {name!r} in [{section}]") from None


# -- events ---------------------------------------------------------------

def read_events_csv(path: str | Path,
                    class_names: Sequence[str]) -> list[tuple[int, int, int]]:
    """Read (time, series, class_id) triples; errors carry line numbers."""
    name_to_id = {name: k for k, name in enumerate(class_names)}
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["time", "series", "class"]:
            raise DataFormatError("expected header 'time,series,class'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DataFormatError(f"expected 3 fields, got {len(row)}",
                                      line=lineno)
            try:
                time = int(row[0])
                series = int(row[1])
            except ValueError:
                raise DataFormatError(f"bad integer in {row!r}",
                                      line=lineno) from None
            name = row[2].strip()
            if name not in name_to_id:
                raise DataFormatError(f"unknown class name {name!r}",
                                      line=lineno)
            records.append((time, series, name_to_id[name]))
    return records


def write_events_csv(path: str | Path, dataset: EventDataset,
                     class_names: Sequence[str]):
    """Write events ordered by (time, series, class)."""
    rows = sorted((rec.time, rec.series, rec.class_id)
                  for rec in dataset.records())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "series", "class"])
        for time, series, class_id in rows:
            writer.writerow([time, series, class_names[class_id]])


def read_dataset_csv(path: str | Path, config: RunConfig) -> EventDataset:
    records = read_events_csv(path, config.class_names)
    return validate_dataset(records, config.n_series, len(config.class_names))


# -- signals ----------------------------------------------------------------

def read_signal_csv(path: str | Path, rate: float = 1.0) -> Signal:
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["sample", "value"]:
            raise DataFormatError("expected header 'sample,value'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values.append(float(row[1]))
            except (IndexError, ValueError):
                raise DataFormatError(f"bad signal row {row!r}",
                                      line=lineno) from None
    return Signal(np.asarray(values), rate=rate)


def write_signal_csv(path: str | Path, signal: Signal):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "value"])
        for i, v in enumerate(signal.samples):
            writer.writerow([i, repr(float(v))])


def class_coded_to_records(values: np.ndarray,
                           series: int) -> list[tuple[int, int, int]]:
    """Convert a class-coded sample array (0 = none, v = class v-1)."""
    values = np.asarray(values, dtype=np.int64)
    hits = np.flatnonzero(values)
    return [(int(t), series, int(values[t]) - 1) for t in hits]


# -- reports ----------------------------------------------------------------

def write_reports_csv(path: str | Path, reports: Iterable[SyncReport],
                      class_names: Sequence[str]):
    """Serialize one or more reports into the long report format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "pair", "class_a", "class_b", "buffer",
                         "value"])
        for report in reports:
            buf = "" if report.buffer is None else report.buffer
            for k, q in enumerate(report.q_per_class):
                writer.writerow(["q_class", "", class_names[k], "", buf,
                                 repr(float(q))])
            for (k1, k2) in sorted(report.q_inter):
                writer.writerow(["q_inter", "", class_names[k1],
                                 class_names[k2], buf,
                                 repr(float(report.q_inter[(k1, k2)]))])
            for (i, j, k1, k2) in sorted(report.s_pairwise):
                writer.writerow(["s_pair", f"{i}-{j}", class_names[k1],
                                 class_names[k2], buf,
                                 repr(float(report.s_pairwise[(i, j, k1, k2)]))])
            writer.writerow(["si", "", "", "", buf, repr(float(report.si_global))])
            if report.si_weighted is not None:
                writer.writerow(["si_weighted", "", "", "", buf,
                                 repr(float(report.si_weighted))])
