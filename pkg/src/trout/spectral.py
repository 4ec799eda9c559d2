"""Transforms between real time series and one-sided complex spectra.

The forward transform keeps DFT bins 0 through N/2 - 1 and discards the
Nyquist bin, so a length-N series maps to N/2 complex coefficients. The
inverse rebuilds the full conjugate-symmetric spectrum with a zero Nyquist
bin, giving an exact round trip for signals without Nyquist energy. The
forward transform is unnormalized (bin k = sum_t x_t e^{-2 pi i k t / N});
the inverse carries the 1/N factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TimeSeries", "dft_forward", "dft_inverse", "spectral_matrix"]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TimeSeries:
    """Real-valued signal sampled at a fixed rate.

    The sample count must be a power of two; the spectral round trip and the
    scenario generators rely on it.
    """

    values: np.ndarray
    sample_rate_hz: float = 128.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("time series values must be one-dimensional")
        if not _is_power_of_two(values.size):
            raise ValueError(
                f"time series length {values.size} is not a power of two"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("time series contains non-finite values")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample rate must be positive")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def _as_samples(ts) -> np.ndarray:
    """Accept a TimeSeries or a bare 1-D array with the same invariants."""
    if isinstance(ts, TimeSeries):
        return ts.values
    x = np.asarray(ts, dtype=float)
    if x.ndim != 1 or not _is_power_of_two(x.size):
        raise ValueError("expected a 1-D signal with power-of-two length")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    return x


def dft_forward(ts) -> np.ndarray:
    """One-sided unnormalized DFT of a real signal.

    Parameters
    ----------
    ts : TimeSeries or 1-D array
        Real signal of power-of-two length N.

    Returns
    -------
    np.ndarray
        Complex bins 0 .. N/2 - 1; the Nyquist bin is discarded.
    """
    x = _as_samples(ts)
    return np.fft.fft(x)[: x.size // 2]


def dft_inverse(spectrum, n_samples: int, sample_rate_hz: float | None = None) -> TimeSeries:
    """Rebuild the real signal whose one-sided spectrum is ``spectrum``.

    The full spectrum is completed by conjugate symmetry with a zero Nyquist
    bin and the inverse transform is scaled by 1/N. The output is real by
    construction (any imaginary residue is dropped).
    """
    s = np.asarray(spectrum, dtype=complex)
    if s.ndim != 1 or 2 * s.size != n_samples:
        raise ValueError(
            f"spectrum length {s.size} does not match n_samples {n_samples}"
        )
    full = np.zeros(n_samples, dtype=complex)
    full[: s.size] = s
    full[s.size + 1 :] = np.conj(s[1:][::-1])
    x = np.fft.ifft(full).real
    rate = float(n_samples) if sample_rate_hz is None else float(sample_rate_hz)
    return TimeSeries(x, rate)


def spectral_matrix(dataset) -> np.ndarray:
    """Stack the one-sided spectra of equal-length series into an n x p matrix."""
    if len(dataset) == 0:
        return np.empty((0, 0), dtype=complex)
    lengths = {_as_samples(ts).size for ts in dataset}
    if len(lengths) != 1:
        raise ValueError(f"series lengths differ: {sorted(lengths)}")
    return np.vstack([dft_forward(ts) for ts in dataset])
