"""WAV decoding, mono downmix, and resampling to the encoder sample rate."""

from __future__ import annotations

import math

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import AudioError

_PCM_SCALE = {
    np.dtype(np.int16): 32768.0,
    np.dtype(np.int32): 2147483648.0,
}


def read_audio(path: str, target_rate: int = 16000) -> np.ndarray:
    """Decode a WAV file to mono float32 at target_rate.

    Integer PCM is scaled to [-1, 1]; multi-channel audio is averaged
    down to mono before resampling.
    """
    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as exc:
        raise AudioError(f"cannot decode {path}: {exc}") from exc
    if data.size == 0:
        raise AudioError(f"{path}: empty audio stream")
    if data.dtype in _PCM_SCALE:
        wave = data.astype(np.float64) / _PCM_SCALE[data.dtype]
    elif data.dtype == np.uint8:
        wave = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype in (np.float32, np.float64):
        wave = data.astype(np.float64)
    else:
        raise AudioError(f"{path}: unsupported sample format {data.dtype}")
    if wave.ndim == 2:
        wave = wave.mean(axis=1)
    elif wave.ndim != 1:
        raise AudioError(f"{path}: unsupported array shape {wave.shape}")
    if rate <= 0:
        raise AudioError(f"{path}: invalid sample rate {rate}")
    if rate != target_rate:
        g = math.gcd(int(rate), int(target_rate))
        wave = resample_poly(wave, target_rate // g, rate // g)
    if wave.size == 0:
        raise AudioError(f"{path}: no samples left after resampling")
    return wave.astype(np.float32)
