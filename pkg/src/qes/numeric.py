"""Shared numeric settings."""
from __future__ import annotations

import os

DOUBLE_BITS = 53
ENV_VAR = "QES_PRECISION_BITS"
CERTIFICATE_BITS = 128  # least-squares certificates for n >= 5 need more than doubles


def precision_bits(override: int | None = None) -> int:
    """Significand bits for extended-precision kernels.

    ``override`` wins, then the environment variable, then double precision.
    """
    if override is not None:
        bits = int(override)
    else:
        raw = os.environ.get(ENV_VAR, "").strip()
        bits = int(raw) if raw else DOUBLE_BITS
    if bits < DOUBLE_BITS:
        raise ValueError(f"precision must be at least {DOUBLE_BITS} bits, got {bits}")
    return bits


def certificate_bits(n: int, override: int | None = None) -> int:
    """Precision for the numeric certificate at degree ``n``.

    An explicit override or the environment variable wins; otherwise
    doubles up to n = 4 and CERTIFICATE_BITS beyond.
    """
    if override is not None or os.environ.get(ENV_VAR, "").strip():
        return precision_bits(override)
    return DOUBLE_BITS if n <= 4 else CERTIFICATE_BITS
