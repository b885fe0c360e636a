"""Working-precision helpers.

Precision is given in bits.  At 53 bits the package computes with plain
numpy ``float64``/``complex128``; above that, scalars are ``mpmath`` numbers
held in object arrays and every operation runs inside ``mpmath.workprec``.
"""

from __future__ import annotations

import math
from contextlib import nullcontext

import mpmath
import numpy as np

DOUBLE = 53


def check_precision(prec: int) -> int:
    prec = int(prec)
    if prec < DOUBLE:
        raise ValueError(f"precision must be at least {DOUBLE} bits, got {prec}")
    return prec


def is_double(prec: int) -> bool:
    return check_precision(prec) == DOUBLE


def working(prec: int):
    """Context manager activating ``prec`` bits for mpmath arithmetic."""
    if is_double(prec):
        return nullcontext()
    return mpmath.workprec(prec)


def unit_roundoff(prec: int) -> float:
    """Upper bound 2**(1 - prec) on the relative rounding error."""
    return 2.0 ** (1 - check_precision(prec))


def bits_from_digits(digits: int) -> int:
    """Bits needed for ``digits`` decimal digits, never below double."""
    return max(DOUBLE, math.ceil(digits * math.log2(10)))


def digits_from_bits(prec: int) -> int:
    return math.ceil(prec * math.log10(2))


def to_precision(values, prec: int) -> np.ndarray:
    """Return ``values`` as an array of scalars at ``prec`` bits.

    Must be called inside ``working(prec)`` when ``prec`` exceeds double.
    """
    arr = np.asarray(values)
    if is_double(prec):
        if arr.dtype == object:
            if any(isinstance(v, (complex, mpmath.mpc)) for v in arr.flat):
                return np.array([complex(v) for v in arr.flat]).reshape(arr.shape)
            return np.array([float(v) for v in arr.flat]).reshape(arr.shape)
        return arr.copy()
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, (complex, np.complexfloating, mpmath.mpc)):
            out[idx] = mpmath.mpc(v)
        elif isinstance(v, (int, np.integer)):
            out[idx] = mpmath.mpf(int(v))
        else:
            out[idx] = mpmath.mpf(v)
    return out


def is_complex_array(arr: np.ndarray) -> bool:
    if arr.dtype == object:
        return any(isinstance(v, mpmath.mpc) for v in arr.flat)
    return np.iscomplexobj(arr)


def absmax(arr) -> float | mpmath.mpf:
    """Largest absolute entry; 0 for an empty array."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0.0
    if arr.dtype == object:
        return max(abs(v) for v in arr.flat)
    return float(np.max(np.abs(arr)))
