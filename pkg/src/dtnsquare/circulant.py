"""Circulant matrices stored by their first row.

A circulant ``C`` of size ``n`` is determined by ``row`` through
``C[i, j] = row[(j - i) % n]``.  Its eigenvectors are the Fourier modes
``v_m[j] = exp(2*pi*i*j*m/n)`` with eigenvalues

    mu_m = sum_j row[j] * exp(2*pi*i*j*m/n),    m = 0..n-1.

Rows may hold Python/numpy integers (exact), ``float64``/``complex128``
(53-bit precision) or mpmath numbers in object arrays (higher precision).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import InvalidSizeError, NotPSDError, SizeMismatchError
from .precision import (
    DOUBLE,
    absmax,
    check_precision,
    is_complex_array,
    is_double,
    to_precision,
    unit_roundoff,
    working,
)

MIN_SIZE = 3


def _check_size(n: int) -> int:
    if int(n) != n or n < MIN_SIZE:
        raise InvalidSizeError(f"circulant size must be an integer >= {MIN_SIZE}, got {n}")
    return int(n)


@dataclass(frozen=True, eq=False)
class Circulant:
    """Square circulant matrix held as its generating first row."""

    row: np.ndarray
    prec: int = DOUBLE

    def __post_init__(self):
        prec = check_precision(self.prec)
        row = np.asarray(self.row)
        if row.ndim != 1:
            raise InvalidSizeError("circulant row must be one-dimensional")
        _check_size(row.size)
        exact = row.dtype != object and np.issubdtype(row.dtype, np.integer)
        if not exact:
            with working(prec):
                row = to_precision(row, prec)
        row = row.copy()
        row.flags.writeable = False
        object.__setattr__(self, "row", row)
        object.__setattr__(self, "prec", prec)

    @property
    def n(self) -> int:
        return self.row.size

    @property
    def is_complex(self) -> bool:
        return is_complex_array(self.row)

    @classmethod
    def identity(cls, n: int, scale=1, prec: int = DOUBLE):
        return cls(np.array([scale] + [0] * (_check_size(n) - 1)), prec)

    def dense(self) -> np.ndarray:
        idx = (np.arange(self.n)[None, :] - np.arange(self.n)[:, None]) % self.n
        return self.row[idx]

    @property
    def T(self):
        return type(self)(self.row[(-np.arange(self.n)) % self.n], self.prec)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise SizeMismatchError(f"vector of length {x.shape} against size {self.n}")
        with working(self.prec):
            return self.dense() @ x

    def row_sums(self):
        with working(self.prec):
            return sum(self.row[1:], self.row[0])

    def __add__(self, other):
        return mat_op(self, other, "add")

    def __sub__(self, other):
        return mat_op(self, other, "sub")

    def __matmul__(self, other):
        return mat_op(self, other, "mul")

    def __neg__(self):
        with working(self.prec):
            return type(self)(-self.row, self.prec)

    def scale(self, factor):
        with working(self.prec):
            return type(self)(self.row * factor, self.prec)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, prec={self.prec}, row={list(self.row)!r})"


class SymCirculant(Circulant):
    """Circulant with ``row[j] == row[n - j]``: symmetric, real spectrum.

    Construction checks symmetry to within ``64 * n`` units of roundoff
    relative to the largest entry and then stores the exactly symmetrised
    row.
    """

    def __post_init__(self):
        super().__post_init__()
        row, n = self.row, self.n
        mirrored = row[(-np.arange(n)) % n]
        with working(self.prec):
            gap = absmax(row - mirrored)
            if row.dtype != object and np.issubdtype(row.dtype, np.integer):
                if gap != 0:
                    raise ValueError("row is not symmetric")
                return
            tol = 64 * n * unit_roundoff(self.prec) * absmax(row)
            if gap > tol:
                raise ValueError(f"row is not symmetric (asymmetry {float(gap):.3e})")
            sym = (row + mirrored) / 2
        sym.flags.writeable = False
        object.__setattr__(self, "row", sym)


def minus_laplacian(n: int, prec: int = DOUBLE) -> SymCirculant:
    """Second-difference operator on the n-cycle: 2 on the diagonal, -1 on the neighbours."""
    n = _check_size(n)
    row = np.zeros(n, dtype=np.int64)
    row[0] = 2
    row[1] -= 1
    row[-1] -= 1
    return SymCirculant(row, prec)


def adjacency_B(n: int, prec: int = DOUBLE) -> Circulant:
    """Inter-layer coupling ``B[i, i] = B[i, i+1] = -1`` (indices mod n)."""
    n = _check_size(n)
    row = np.zeros(n, dtype=np.int64)
    row[0] = -1
    row[1] = -1
    return Circulant(row, prec)


def _unify(a: Circulant, b: Circulant):
    if a.n != b.n:
        raise SizeMismatchError(f"sizes {a.n} and {b.n} differ")
    prec = max(a.prec, b.prec)
    ra, rb = a.row, b.row
    if prec != a.prec or prec != b.prec:
        with working(prec):
            if not (ra.dtype != object and np.issubdtype(ra.dtype, np.integer)):
                ra = to_precision(ra, prec)
            if not (rb.dtype != object and np.issubdtype(rb.dtype, np.integer)):
                rb = to_precision(rb, prec)
    return ra, rb, prec


def _circular_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # first row of the product: (AB)[0, j] = sum_k a[k] * b[(j - k) % n]
    out = a[0] * b
    for k in range(1, a.size):
        out = out + a[k] * np.roll(b, k)
    return out


def mat_op(a, b, kind: str):
    """Add, subtract or multiply two matrices, circulant or dense.

    Two circulants give a circulant (symmetric if both are symmetric, since
    circulants commute); anything involving a dense array gives a dense array.
    """
    if kind not in ("add", "sub", "mul"):
        raise ValueError(f"unknown matrix operation {kind!r}")
    if isinstance(a, Circulant) and isinstance(b, Circulant):
        ra, rb, prec = _unify(a, b)
        with working(prec):
            if kind == "add":
                row = ra + rb
            elif kind == "sub":
                row = ra - rb
            else:
                row = _circular_convolve(ra, rb)
        cls = SymCirculant if isinstance(a, SymCirculant) and isinstance(b, SymCirculant) else Circulant
        return cls(row, prec)
    prec = max(getattr(a, "prec", DOUBLE), getattr(b, "prec", DOUBLE))
    da = a.dense() if isinstance(a, Circulant) else np.asarray(a)
    db = b.dense() if isinstance(b, Circulant) else np.asarray(b)
    if da.ndim != 2 or db.ndim != 2:
        raise SizeMismatchError("dense operands must be two-dimensional")
    if kind == "mul":
        if da.shape[1] != db.shape[0]:
            raise SizeMismatchError(f"cannot multiply {da.shape} by {db.shape}")
    elif da.shape != db.shape:
        raise SizeMismatchError(f"shapes {da.shape} and {db.shape} differ")
    with working(prec):
        if kind == "add":
            return da + db
        if kind == "sub":
            return da - db
        return da @ db


def max_norm(a):
    """Largest absolute entry of a circulant or dense matrix."""
    if isinstance(a, Circulant):
        with working(a.prec):
            return absmax(a.row)
    return absmax(a)


def _roots_table(n: int, prec: int) -> np.ndarray:
    # exp(2*pi*i*r/n) for r = 0..n-1, so index products reduce mod n exactly
    return np.array([mpmath.expjpi(mpmath.mpf(2 * r) / n) for r in range(n)], dtype=object)


def spectrum(c: Circulant) -> np.ndarray:
    """Eigenvalues ``mu_m`` for ``m = 0..n-1`` in mode order.

    Real-valued (float or mpf) for a :class:`SymCirculant`, complex otherwise.
    At double precision the sum is taken with an FFT; at higher precision it
    is summed directly.
    """
    n = c.n
    sym = isinstance(c, SymCirculant)
    if is_double(c.prec):
        mu = n * np.fft.ifft(np.asarray(c.row, dtype=complex))
        return mu.real.copy() if sym and not c.is_complex else mu
    with working(c.prec):
        row = to_precision(c.row, c.prec)
        m = np.arange(n)
        if sym and not c.is_complex:
            cos_tab = np.array([mpmath.cospi(mpmath.mpf(2 * r) / n) for r in range(n)], dtype=object)
            return np.array([sum(row * cos_tab[(m * k) % n]) for k in range(n)], dtype=object)
        roots = _roots_table(n, c.prec)
        return np.array([sum(row * roots[(m * k) % n]) for k in range(n)], dtype=object)


def from_spectrum(mu, prec: int = DOUBLE, symmetric: bool = False) -> Circulant:
    """Inverse of :func:`spectrum`: ``row[j] = (1/n) sum_m mu_m exp(-2*pi*i*j*m/n)``."""
    mu = np.asarray(mu)
    n = _check_size(mu.size)
    if is_double(prec):
        row = np.fft.fft(mu) / n
        if symmetric:
            return SymCirculant(row.real.copy(), prec)
        return Circulant(row, prec)
    with working(prec):
        mu = to_precision(mu, prec)
        m = np.arange(n)
        if symmetric:
            cos_tab = np.array([mpmath.cospi(mpmath.mpf(2 * r) / n) for r in range(n)], dtype=object)
            row = np.array([sum(mu * cos_tab[(m * j) % n]) / n for j in range(n)], dtype=object)
            row = np.array([mpmath.re(v) for v in row], dtype=object)
            return SymCirculant(row, prec)
        roots = _roots_table(n, prec)
        row = np.array([sum(mu * roots[(-m * j) % n]) / n for j in range(n)], dtype=object)
        return Circulant(row, prec)


def psd_tolerance(c: Circulant):
    return 64 * c.n * unit_roundoff(c.prec) * max_norm(c)


def sqrt_psd(c: SymCirculant) -> SymCirculant:
    """Principal square root of a positive semidefinite symmetric circulant.

    Eigenvalues in ``[-tol, tol]`` with ``tol = 64 n 2**(1-p) max|c|`` are
    set to zero, so a kernel lost to roundoff stays a kernel instead of
    turning into a ``sqrt(u)`` sized eigenvalue; anything below ``-tol``
    raises :class:`NotPSDError`.
    """
    if not isinstance(c, SymCirculant):
        raise TypeError("sqrt_psd needs a SymCirculant")
    mu = spectrum(c)
    with working(c.prec):
        tol = psd_tolerance(c)
        lowest = min(mu)
        if lowest < -tol:
            raise NotPSDError(f"eigenvalue {float(lowest):.3e} below -{float(tol):.3e}")
        if is_double(c.prec):
            root = np.where(mu > tol, np.sqrt(np.maximum(mu, 0.0)), 0.0)
        else:
            root = np.array([mpmath.sqrt(v) if v > tol else mpmath.mpf(0) for v in mu], dtype=object)
    return from_spectrum(root, c.prec, symmetric=True)


def check_bbt_identity(n: int) -> bool:
    """Exact integer check that ``4I - B B^T`` equals the cycle Laplacian."""
    n = _check_size(n)
    b = adjacency_B(n).dense().astype(object)
    lap = minus_laplacian(n).dense().astype(object)
    four = 4 * np.eye(n, dtype=np.int64).astype(object)
    return bool(np.all(four - b @ b.T == lap))
