"""Frequency-domain conversion of power traces.

Radix-2 Cooley-Tukey FFT implemented directly (no numpy.fft), with
normalized bin frequencies in cycles/sample. Traces shorter than the
transform length are zero-padded to the next power of two >= 8.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericInputError, ShapeError

MIN_FFT_SIZE = 8


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _bit_reversed_indices(n: int) -> np.ndarray:
    # n is a power of two; reverse the bit pattern of each index
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT bins of one trace plus the positive-frequency magnitude view.

    Bin k maps to normalized frequency k / n_fft (cycles/sample). The
    magnitude view covers k = 1..n_fft/2, excluding the DC bin.
    """

    bins: np.ndarray
    n_fft: int
    freqs: np.ndarray = field(init=False, repr=False)
    magnitudes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.n_fft
        if n < MIN_FFT_SIZE or (n & (n - 1)) != 0:
            raise ShapeError(f"transform length must be a power of two >= {MIN_FFT_SIZE}, got {n}")
        if self.bins.shape != (n,):
            raise ShapeError(f"expected {n} bins, got shape {self.bins.shape}")
        half = n // 2
        freqs = np.arange(1, half + 1) / n
        mags = np.abs(self.bins[1 : half + 1])
        freqs.setflags(write=False)
        mags.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "magnitudes", mags)

    def bin_freq(self, k: int) -> float:
        return k / self.n_fft


def fft(samples) -> Spectrum:
    """Transform a real sample sequence to the frequency domain.

    The input is zero-padded to the next power of two >= max(8, len) and
    a decimation-in-time radix-2 FFT is applied.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ShapeError(f"need a 1-D sequence of >= 2 samples, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise NumericInputError(f"non-finite sample at index {bad}")

    n = _next_pow2(max(MIN_FFT_SIZE, x.size))
    padded = np.zeros(n, dtype=np.complex128)
    padded[: x.size] = x

    out = padded[_bit_reversed_indices(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(-1, size)
        upper = blocks[:, :half].copy()
        lower = blocks[:, half:] * twiddle
        blocks[:, :half] = upper + lower
        blocks[:, half:] = upper - lower
        size *= 2

    out.setflags(write=False)
    return Spectrum(bins=out, n_fft=n)


def magnitude_spectrum(spectrum: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    """Positive-frequency magnitude view: (freqs, |X[k]|) for k = 1..N/2."""
    return spectrum.freqs, spectrum.magnitudes
