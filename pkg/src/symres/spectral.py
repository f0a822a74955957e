"""FFT-based differentiation and trigonometric interpolation on periodic grids.

The derivative multiplier at the Nyquist frequency is set to zero, which
keeps the differentiation matrix real and antisymmetric; grid sums of
derivatives then vanish to machine precision (discrete integration by
parts holds exactly).
"""

from __future__ import annotations

import numpy as np


def wavenumbers(N: int) -> np.ndarray:
    """Signed integer frequencies of an N-point periodic grid, FFT order,
    with the Nyquist bin zeroed for differentiation."""
    k = np.fft.fftfreq(N, d=1.0 / N)
    k = k.astype(float)
    if N % 2 == 0:
        k[N // 2] = 0.0
    return k


def fourier_diff(a: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
    """Spectral derivative of samples on a 2*pi-periodic grid along `axis`.

    Exact for trigonometric polynomials of degree below Nyquist.
    """
    N = a.shape[axis]
    ah = np.fft.fft(a, axis=axis)
    k = wavenumbers(N)
    shape = [1] * a.ndim
    shape[axis] = N
    ah *= (1j * k.reshape(shape)) ** order if order != 1 else (1j * k).reshape(shape)
    return np.fft.ifft(ah, axis=axis)


def fourier_coefficients(a: np.ndarray, axis: int) -> np.ndarray:
    """DFT coefficients c_k (FFT bin order) with p(x_j) = sum_k c_k e^{i k x_j}."""
    return np.fft.fft(a, axis=axis) / a.shape[axis]


def trig_interp(a: np.ndarray, axis: int, t: float) -> np.ndarray:
    """Evaluate the trigonometric interpolant of samples `a` at coordinate
    `t` (in [0, 2*pi)) along `axis`.  The Nyquist mode is split symmetrically
    so real data interpolates to real values."""
    N = a.shape[axis]
    c = np.moveaxis(fourier_coefficients(a, axis), axis, -1)
    k = np.fft.fftfreq(N, d=1.0 / N)
    phase = np.exp(1j * k * t)
    if N % 2 == 0:
        # e^{+i(N/2)t} and e^{-i(N/2)t} share one stored coefficient
        phase[N // 2] = np.cos(N // 2 * t)
    return c @ phase


def grid_sum(a: np.ndarray) -> complex:
    """Plain sum over all entries (fixed reduction order for determinism)."""
    return complex(np.sum(a))
