"""FFT wrappers honouring the INLS_THREADS environment variable."""

from __future__ import annotations

import os

from scipy import fft as _fft


def workers() -> int:
    """Thread count for FFTs: INLS_THREADS if set and valid, else 1."""
    raw = os.environ.get("INLS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def fftn(a):
    return _fft.fftn(a, workers=workers())


def ifftn(a):
    return _fft.ifftn(a, workers=workers())
