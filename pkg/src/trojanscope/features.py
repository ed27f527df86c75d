"""Dual-domain feature extraction: 12 time-domain + 13 frequency-domain values.

All statistics use population (1/n) normalization. The frequency features
are computed over the DC-excluded positive-frequency magnitude view of a
whole-trace FFT. Feature order and names are fixed across the pipeline.
"""

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .dsp import Spectrum, fft
from .errors import DataError, NumericInputError, ShapeError, UnknownFeatureError
from .traces import Dataset, PowerTrace

ENTROPY_BINS = 64
ROLLOFF_FRACTION = 0.85
CONTRAST_BANDS = 6
HARMONIC_COUNT = 5
FLATNESS_EPS = 1e-20
STD_FLOOR = 1e-12

TIME_FEATURE_NAMES = (
    "mean", "rms", "variance", "std", "max", "min", "p2p",
    "crest_factor", "skewness", "kurtosis", "energy", "entropy",
)
FREQ_FEATURE_NAMES = (
    "spectral_centroid", "spectral_bandwidth", "spectral_flatness",
    "spectral_rolloff", "spectral_entropy", "spectral_contrast", "thd",
    "harmonic_1", "harmonic_2", "harmonic_3", "harmonic_4", "harmonic_5",
    "spectral_variability",
)
FEATURE_NAMES: tuple[str, ...] = TIME_FEATURE_NAMES + FREQ_FEATURE_NAMES


def schema_fingerprint(names: Sequence[str] = FEATURE_NAMES) -> str:
    """Stable hex digest of an ordered feature-name schema."""
    return hashlib.sha256(",".join(names).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class TimeFeatures:
    mean: float
    rms: float
    variance: float
    std: float
    max: float
    min: float
    p2p: float
    crest_factor: float
    skewness: float
    kurtosis: float
    energy: float
    entropy: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in TIME_FEATURE_NAMES], dtype=np.float64)


@dataclass(frozen=True)
class FreqFeatures:
    spectral_centroid: float
    spectral_bandwidth: float
    spectral_flatness: float
    spectral_rolloff: float
    spectral_entropy: float
    spectral_contrast: float
    thd: float
    harmonic_strength: tuple[float, float, float, float, float]
    spectral_variability: float
    degenerate: bool = False

    def as_array(self) -> np.ndarray:
        head = [self.spectral_centroid, self.spectral_bandwidth, self.spectral_flatness,
                self.spectral_rolloff, self.spectral_entropy, self.spectral_contrast, self.thd]
        return np.array(head + list(self.harmonic_strength) + [self.spectral_variability],
                        dtype=np.float64)


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-schema record of all features for one trace."""

    values: np.ndarray
    label: int
    trojan_id: str
    names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (len(self.names),):
            raise ShapeError(f"expected {len(self.names)} feature values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NumericInputError("feature vector contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "names", tuple(self.names))

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.values[self.names.index(name)])
        except ValueError:
            raise UnknownFeatureError(
                f"unknown feature {name!r}; valid names: {', '.join(self.names)}") from None


def time_features(trace: PowerTrace) -> TimeFeatures:
    """Compute the time-domain statistics of a trace."""
    x = trace.samples
    n = x.size
    mean = float(np.mean(x))
    rms = float(np.sqrt(np.mean(x * x)))
    x_max = float(np.max(x))
    x_min = float(np.min(x))
    p2p = x_max - x_min
    energy = float(np.sum(x * x))

    if p2p == 0.0:
        # all samples identical: spread statistics are zero by convention
        crest = 1.0 if rms > 0.0 else 0.0
        return TimeFeatures(mean=mean, rms=rms, variance=0.0, std=0.0, max=x_max,
                            min=x_min, p2p=0.0, crest_factor=crest, skewness=0.0,
                            kurtosis=0.0, energy=energy, entropy=0.0)

    dev = x - mean
    variance = float(np.mean(dev * dev))
    std = float(np.sqrt(variance))
    z = dev / std
    skewness = float(np.mean(z ** 3))
    kurtosis = float(np.mean(z ** 4))
    crest = x_max / rms

    counts, _ = np.histogram(x, bins=ENTROPY_BINS, range=(x_min, x_max))
    p = counts[counts > 0] / n
    entropy = float(-np.sum(p * np.log(p)))

    return TimeFeatures(mean=mean, rms=rms, variance=variance, std=std, max=x_max,
                        min=x_min, p2p=p2p, crest_factor=crest, skewness=skewness,
                        kurtosis=kurtosis, energy=energy, entropy=entropy)


def freq_features(spectrum: Spectrum) -> FreqFeatures:
    """Compute the frequency-domain features over the DC-excluded magnitude view."""
    freqs = spectrum.freqs
    mags = spectrum.magnitudes
    total = float(np.sum(mags))

    if total == 0.0:
        zeros = (0.0,) * HARMONIC_COUNT
        return FreqFeatures(spectral_centroid=0.0, spectral_bandwidth=0.0,
                            spectral_flatness=1.0, spectral_rolloff=0.0,
                            spectral_entropy=0.0, spectral_contrast=0.0, thd=0.0,
                            harmonic_strength=zeros, spectral_variability=0.0,
                            degenerate=True)

    centroid = float(np.sum(freqs * mags) / total)
    bandwidth = float(np.sqrt(np.sum((freqs - centroid) ** 2 * mags) / total))

    safe = np.maximum(mags, FLATNESS_EPS)
    flatness = float(np.exp(np.mean(np.log(safe))) / np.mean(mags))

    cumulative = np.cumsum(mags)
    rolloff_idx = int(np.searchsorted(cumulative, ROLLOFF_FRACTION * total))
    rolloff = float(freqs[min(rolloff_idx, mags.size - 1)])

    p = mags / total
    p = p[p > 0]
    spectral_entropy = float(-np.sum(p * np.log(p)))

    bands = [b for b in np.array_split(mags, CONTRAST_BANDS) if b.size]
    contrast = float(np.mean([np.max(b) - np.min(b) for b in bands]))

    k0 = int(np.argmax(mags)) + 1  # bin index into the full spectrum
    half = spectrum.n_fft // 2
    fundamental = mags[k0 - 1]
    strengths = []
    ratios_sq = 0.0
    for h in range(1, HARMONIC_COUNT + 1):
        k = h * k0
        if k > half:
            strengths.append(0.0)
            continue
        magnitude = float(mags[k - 1])
        strengths.append(magnitude)
        if h >= 2 and fundamental > 0:
            ratios_sq += (magnitude / fundamental) ** 2
    thd = float(np.sqrt(ratios_sq))

    variability = float(np.mean((mags - np.mean(mags)) ** 2))

    return FreqFeatures(spectral_centroid=centroid, spectral_bandwidth=bandwidth,
                        spectral_flatness=flatness, spectral_rolloff=rolloff,
                        spectral_entropy=spectral_entropy, spectral_contrast=contrast,
                        thd=thd, harmonic_strength=tuple(strengths),
                        spectral_variability=variability)


def extract(trace: PowerTrace) -> FeatureVector:
    """Full feature vector of one trace: time features then frequency features."""
    tf = time_features(trace)
    ff = freq_features(fft(trace.samples))
    values = np.concatenate([tf.as_array(), ff.as_array()])
    return FeatureVector(values=values, label=trace.label, trojan_id=trace.trojan_id)


def extract_dataset(dataset: Dataset) -> list[FeatureVector]:
    return [extract(t) for t in dataset]


@dataclass(frozen=True)
class Standardizer:
    """Per-feature z-score transform fitted on a training set.

    Scale is the population std floored at STD_FLOOR; columns that are
    exactly constant transform to 0.
    """

    mean: np.ndarray
    scale: np.ndarray
    constant: np.ndarray
    names: tuple[str, ...] = FEATURE_NAMES

    def transform_matrix(self, matrix: np.ndarray) -> np.ndarray:
        out = (matrix - self.mean) / self.scale
        out[:, self.constant] = 0.0
        return out

    def transform(self, vector: FeatureVector) -> FeatureVector:
        values = self.transform_matrix(vector.values[None, :])[0]
        return FeatureVector(values=values, label=vector.label,
                             trojan_id=vector.trojan_id, names=vector.names)

    def to_params(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist(),
                "constant": [bool(c) for c in self.constant]}

    @classmethod
    def from_params(cls, params: dict, names: tuple[str, ...] = FEATURE_NAMES) -> "Standardizer":
        return cls(mean=np.asarray(params["mean"], dtype=np.float64),
                   scale=np.asarray(params["scale"], dtype=np.float64),
                   constant=np.asarray(params["constant"], dtype=bool),
                   names=names)


def fit_standardizer(train: Sequence[FeatureVector]) -> Standardizer:
    """Fit per-feature mean and std (population) on training vectors."""
    if len(train) < 2:
        raise DataError(f"standardizer needs >= 2 training vectors, got {len(train)}")
    _require_uniform_schema(train)
    matrix = feature_matrix(train)
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    constant = matrix.max(axis=0) == matrix.min(axis=0)
    scale = np.maximum(std, STD_FLOOR)
    return Standardizer(mean=mean, scale=scale, constant=constant, names=train[0].names)


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.stack([v.values for v in vectors])


def labels_array(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([v.label for v in vectors], dtype=np.int64)


def _require_uniform_schema(vectors: Sequence[FeatureVector]) -> None:
    first = vectors[0].names
    for v in vectors[1:]:
        if v.names != first:
            raise ShapeError("feature vectors have mismatched schemas")


def write_feature_csv(vectors: Sequence[FeatureVector], path) -> None:
    """Write vectors as CSV with the canonical header; floats use repr."""
    if not vectors:
        raise DataError("no feature vectors to write")
    _require_uniform_schema(vectors)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("trojan_id", "label") + vectors[0].names)
        for v in vectors:
            writer.writerow([v.trojan_id, v.label] + [repr(float(x)) for x in v.values])


def read_feature_csv(path) -> list[FeatureVector]:
    path = Path(path)
    with open(path, "r", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DataError(f"feature CSV has no data rows: {path}")
    names = tuple(rows[0][2:])
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(names) + 2:
            raise ShapeError(f"{path.name}: row {i} has {len(row)} cells, expected {len(names) + 2}")
        values = [float(c) for c in row[2:]]
        out.append(FeatureVector(values=np.array(values), label=int(row[1]),
                                 trojan_id=row[0], names=names))
    return out
