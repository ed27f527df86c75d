"""Power-trace datasets: CSV loading/writing, synthetic generation, splitting.

Traces carry no time axis; all downstream frequencies are normalized
(cycles/sample). The synthetic generator is a pure function of its config:
identical seed and config produce bit-identical datasets.
"""

import csv
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConfigError,
    EmptyDatasetError,
    NumericInputError,
    ParseError,
    ShapeError,
    StratificationError,
)


class TrojanState(str, Enum):
    DISABLED = "Disabled"
    TRIGGERED = "Triggered"


class InputMode(str, Enum):
    FIXED_INPUT = "FixedInput"
    CHAINED_INPUT = "ChainedInput"


class TraceSource(str, Enum):
    DATASET_FILE = "DatasetFile"
    SYNTHETIC = "Synthetic"


class CsvLayout(str, Enum):
    ROW_PER_TRACE = "RowPerTrace"
    COLUMN_PER_TRACE = "ColumnPerTrace"


class TrojanEffect(str, Enum):
    SPIKE_TRAIN = "SpikeTrain"
    HARMONIC_INJECTION = "HarmonicInjection"
    VARIANCE_INFLATION = "VarianceInflation"
    DUTY_DRAIN = "DutyDrain"


@dataclass(frozen=True)
class PowerTrace:
    """One labeled power-consumption time series."""

    samples: np.ndarray
    trojan_id: str
    state: TrojanState
    input_mode: InputMode = InputMode.FIXED_INPUT
    temperature_c: float = 25.0
    source: TraceSource = TraceSource.DATASET_FILE

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.float64)
        if x.ndim != 1 or x.size < 2:
            raise ShapeError(f"trace needs >= 2 samples, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            bad = int(np.flatnonzero(~np.isfinite(x))[0])
            raise NumericInputError(f"non-finite sample at index {bad}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def label(self) -> int:
        """Binary label; triggered is the positive class."""
        return 1 if self.state is TrojanState.TRIGGERED else 0


@dataclass(frozen=True)
class Dataset:
    """Immutable sequence of traces with labels derived from trace state."""

    traces: tuple[PowerTrace, ...]

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    @property
    def labels(self) -> np.ndarray:
        return np.array([t.label for t in self.traces], dtype=np.int64)

    @property
    def class_counts(self) -> dict[TrojanState, int]:
        counts = {TrojanState.DISABLED: 0, TrojanState.TRIGGERED: 0}
        for t in self.traces:
            counts[t.state] += 1
        return counts

    @property
    def trojan_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for t in self.traces:
            seen.setdefault(t.trojan_id, None)
        return tuple(seen)

    def filter_trojan(self, trojan_id: str) -> "Dataset":
        return Dataset(tuple(t for t in self.traces if t.trojan_id == trojan_id))


@dataclass(frozen=True)
class LabelRule:
    """How trace state is resolved when loading CSV files.

    kind "filename": a token of the file stem names the state.
    kind "dirname": the parent directory name names the state.
    kind "column": a 0-based column holds the state per trace; the column
    is removed from the samples.
    """

    kind: str = "filename"
    column: int | None = None
    positive_token: str = "triggered"
    negative_token: str = "disabled"

    def __post_init__(self):
        if self.kind not in ("filename", "dirname", "column"):
            raise ConfigError(f"labeling.kind must be filename|dirname|column, got {self.kind!r}")
        if self.kind == "column" and self.column is None:
            raise ConfigError("labeling.kind 'column' requires labeling.column")


@dataclass(frozen=True)
class SyntheticConfig:
    """Generator settings for desk-scale trojan/clean trace datasets."""

    n_per_class: int
    trace_len: int
    base_mean: float = 1.0
    base_noise_sd: float = 0.1
    carrier_freqs: tuple[float, ...] = (0.1,)
    separability: float = 1.0
    effect: TrojanEffect = TrojanEffect.VARIANCE_INFLATION
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "carrier_freqs", tuple(float(f) for f in self.carrier_freqs))
        object.__setattr__(self, "effect", TrojanEffect(self.effect))
        if self.n_per_class < 1:
            raise ConfigError(f"n_per_class must be >= 1, got {self.n_per_class}")
        if self.trace_len < 8:
            raise ConfigError(f"trace_len must be >= 8 (FFT minimum), got {self.trace_len}")
        if self.base_noise_sd < 0:
            raise ConfigError(f"base_noise_sd must be >= 0, got {self.base_noise_sd}")
        for f in self.carrier_freqs:
            if not 0.0 < f < 0.5:
                raise ConfigError(f"carrier_freqs entries must lie in (0, 0.5), got {f}")
        if not 0.0 <= self.separability <= 1.0:
            raise ConfigError(f"separability must lie in [0, 1], got {self.separability}")
        if self.effect is TrojanEffect.HARMONIC_INJECTION and not self.carrier_freqs:
            raise ConfigError("HarmonicInjection needs at least one carrier frequency")


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/test partition settings."""

    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


_TROJAN_TOKEN = re.compile(r"^T\d+$", re.IGNORECASE)

# spike density, spike amplitude per unit separability, square-wave amplitude
_SPIKE_DENSITY = 0.02
_SPIKE_AMPLITUDE = 5.0
_DRAIN_AMPLITUDE = 1.0


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"cell at row {row} column {col} is not a number: {cell!r}", row=row, column=col) from None
    if not np.isfinite(value):
        raise ParseError(f"cell at row {row} column {col} is not finite: {cell!r}", row=row, column=col)
    return value


def _state_from_token(token: str, rule: LabelRule, where: str) -> TrojanState:
    low = token.lower()
    if rule.positive_token in low:
        return TrojanState.TRIGGERED
    if rule.negative_token in low:
        return TrojanState.DISABLED
    raise ParseError(f"cannot resolve trace state from {where}: {token!r} "
                     f"(expected a {rule.positive_token!r} or {rule.negative_token!r} token)")


def _trojan_id_from_name(path: Path) -> str:
    for token in re.split(r"[_\-. ]+", path.stem):
        if _TROJAN_TOKEN.match(token):
            return token.upper()
    return path.stem


def _read_rows(path: Path) -> list[list[str]]:
    with open(path, "r", newline="") as fh:
        return [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]


def load_csv_dataset(path, layout: CsvLayout = CsvLayout.ROW_PER_TRACE,
                     labeling: LabelRule = LabelRule(),
                     trojan_id: str | None = None) -> Dataset:
    """Load one CSV file or every *.csv under a directory into a Dataset.

    RowPerTrace: each row is one trace; rows must be uniform length within
    a file. ColumnPerTrace: each column is one trace. File order (sorted by
    name for directories) and row order are preserved.
    """
    path = Path(path)
    layout = CsvLayout(layout)
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
        if not files:
            raise EmptyDatasetError(f"no CSV files under {path}")
    elif path.exists():
        files = [path]
    else:
        raise ConfigError(f"input path does not exist: {path}")

    traces: list[PowerTrace] = []
    for file in files:
        traces.extend(_load_one_csv(file, layout, labeling, trojan_id))
    if not traces:
        raise EmptyDatasetError(f"no traces loaded from {path}")
    return Dataset(tuple(traces))


def _load_one_csv(path: Path, layout: CsvLayout, rule: LabelRule,
                  trojan_id: str | None) -> list[PowerTrace]:
    rows = _read_rows(path)
    if not rows:
        raise EmptyDatasetError(f"empty dataset file: {path}")

    tid = trojan_id if trojan_id is not None else _trojan_id_from_name(path)

    file_state: TrojanState | None = None
    if rule.kind == "filename":
        file_state = _state_from_token(path.stem, rule, f"filename {path.name!r}")
    elif rule.kind == "dirname":
        file_state = _state_from_token(path.parent.name, rule, f"directory {path.parent.name!r}")

    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ShapeError(f"{path.name}: ragged row {i + 1} has {len(row)} cells, expected {width}")

    parsed: list[list[float]] = []
    states: list[TrojanState] = []
    if rule.kind == "column":
        label_col = rule.column if rule.column >= 0 else width + rule.column
        if not 0 <= label_col < width:
            raise ConfigError(f"label column {rule.column} out of range for width {width}")
    else:
        label_col = None

    for i, row in enumerate(rows):
        values = []
        for j, cell in enumerate(row):
            if j == label_col:
                states.append(_state_from_token(cell.strip(), rule, f"label cell row {i + 1}"))
                continue
            values.append(_parse_cell(cell.strip(), i + 1, j + 1))
        parsed.append(values)

    if layout is CsvLayout.ROW_PER_TRACE:
        columns = parsed
    else:
        if label_col is not None:
            raise ConfigError("column labeling is only valid with RowPerTrace layout")
        columns = [list(col) for col in zip(*parsed)]

    out = []
    for i, samples in enumerate(columns):
        state = states[i] if label_col is not None else file_state
        out.append(PowerTrace(samples=np.array(samples), trojan_id=tid, state=state,
                              source=TraceSource.DATASET_FILE))
    return out


def write_csv_dataset(dataset: Dataset, path, layout: CsvLayout = CsvLayout.ROW_PER_TRACE) -> None:
    """Write traces to CSV in a layout load_csv_dataset accepts.

    Floats are written with repr so a load round-trips values exactly.
    ColumnPerTrace requires uniform trace lengths.
    """
    layout = CsvLayout(layout)
    rows: Iterable[Iterable[float]]
    if layout is CsvLayout.ROW_PER_TRACE:
        rows = (t.samples for t in dataset)
    else:
        lengths = {len(t.samples) for t in dataset}
        if len(lengths) > 1:
            raise ShapeError(f"ColumnPerTrace needs uniform trace lengths, got {sorted(lengths)}")
        rows = zip(*(t.samples for t in dataset))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def generate_synthetic(config: SyntheticConfig, trojan_id: str = "SYN") -> Dataset:
    """Generate n_per_class disabled + n_per_class triggered traces.

    Disabled traces are base_mean + unit-amplitude carriers (random phase
    per trace) + Gaussian noise. Triggered traces add the configured effect
    scaled by separability; at separability 0 the two generators are
    distributionally identical.
    """
    rng = np.random.default_rng(config.seed)
    traces = []
    for state in (TrojanState.DISABLED, TrojanState.TRIGGERED):
        for _ in range(config.n_per_class):
            traces.append(_one_synthetic_trace(config, state, rng, trojan_id))
    return Dataset(tuple(traces))


def _one_synthetic_trace(cfg: SyntheticConfig, state: TrojanState,
                         rng: np.random.Generator, trojan_id: str) -> PowerTrace:
    n = cfg.trace_len
    t = np.arange(n, dtype=np.float64)
    x = np.full(n, cfg.base_mean, dtype=np.float64)
    for f in cfg.carrier_freqs:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        x += np.sin(2.0 * np.pi * f * t + phase)

    triggered = state is TrojanState.TRIGGERED
    sep = cfg.separability
    noise_sd = cfg.base_noise_sd
    if triggered and cfg.effect is TrojanEffect.VARIANCE_INFLATION:
        noise_sd *= 1.0 + sep
    x += rng.normal(0.0, 1.0, size=n) * noise_sd

    if triggered:
        if cfg.effect is TrojanEffect.SPIKE_TRAIN:
            count = max(1, round(_SPIKE_DENSITY * n))
            positions = rng.choice(n, size=count, replace=False)
            x[positions] += _SPIKE_AMPLITUDE * sep
        elif cfg.effect is TrojanEffect.HARMONIC_INJECTION:
            phase = rng.uniform(0.0, 2.0 * np.pi)
            x += sep * np.sin(2.0 * np.pi * (2.0 * cfg.carrier_freqs[0]) * t + phase)
        elif cfg.effect is TrojanEffect.DUTY_DRAIN:
            period = max(8, n // 4)
            x += _DRAIN_AMPLITUDE * sep * ((t.astype(np.int64) % period) < period // 2)

    return PowerTrace(samples=x, trojan_id=trojan_id, state=state,
                      source=TraceSource.SYNTHETIC)


def split_dataset(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Disjoint train/test partition, stratified by class unless disabled.

    Per-class train counts are round(train_fraction * n_class), so each
    class proportion lands within one sample of train_fraction.
    """
    rng = np.random.default_rng(spec.seed)
    n = len(dataset)
    if n == 0:
        raise EmptyDatasetError("cannot split an empty dataset")

    if spec.stratified:
        labels = dataset.labels
        if len(np.unique(labels)) < 2:
            raise StratificationError("stratified split needs at least one trace of each class")
        train_idx: list[int] = []
        test_idx: list[int] = []
        for cls in (0, 1):
            members = np.flatnonzero(labels == cls)
            perm = rng.permutation(len(members))
            cut = round(spec.train_fraction * len(members))
            train_idx.extend(members[perm[:cut]])
            test_idx.extend(members[perm[cut:]])
        train_idx.sort()
        test_idx.sort()
    else:
        perm = rng.permutation(n)
        cut = round(spec.train_fraction * n)
        train_idx = sorted(perm[:cut].tolist())
        test_idx = sorted(perm[cut:].tolist())

    train = Dataset(tuple(dataset.traces[i] for i in train_idx))
    test = Dataset(tuple(dataset.traces[i] for i in test_idx))
    return train, test
