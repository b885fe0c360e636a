"""Fourier-multiplier model of the DtN map of the unit disc (conductivity 1).

On the boundary circle the map sends ``cos(l t)`` to ``l cos(l t)`` and
``sin(l t)`` to ``l sin(l t)``; applying it twice multiplies mode ``l`` by
``l**2``, which is the action of ``-d^2/dt^2``.

The discrete bridge scales by the grid spacing ``h = 2 pi / n``: ``L / h**2``
discretises ``-d^2/dt^2`` on ``n`` equispaced points, so ``sqrt(L) / h`` is
compared against the continuous multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .circulant import minus_laplacian, spectrum, sqrt_psd
from .errors import InvalidSizeError
from .precision import DOUBLE, absmax, is_double, to_precision, working


@dataclass(frozen=True, eq=False)
class FourierFunction:
    """``f(t) = a[0] + sum_{l=1..M} a[l] cos(l t) + b[l] sin(l t)``.

    ``a`` and ``b`` both have length ``M + 1``; ``b[0]`` is always zero.
    """

    a: np.ndarray
    b: np.ndarray
    prec: int = DOUBLE

    def __post_init__(self):
        a, b = np.asarray(self.a), np.asarray(self.b)
        if a.ndim != 1 or a.shape != b.shape:
            raise InvalidSizeError("cosine and sine coefficient arrays must have equal length")
        if b[0] != 0:
            raise ValueError("b[0] has no sine mode and must be zero")
        with working(self.prec):
            object.__setattr__(self, "a", to_precision(a, self.prec))
            object.__setattr__(self, "b", to_precision(b, self.prec))

    @property
    def M(self) -> int:
        return self.a.size - 1

    @classmethod
    def zeros(cls, M: int, prec: int = DOUBLE):
        return cls(np.zeros(M + 1), np.zeros(M + 1), prec)

    @classmethod
    def mode(cls, l: int, kind: str, amplitude=1.0, M: int | None = None, prec: int = DOUBLE):
        """A single ``amplitude * cos(l t)`` (``kind="cos"``) or ``sin(l t)``."""
        M = l if M is None else M
        a, b = np.zeros(M + 1), np.zeros(M + 1)
        if kind == "cos":
            a[l] = amplitude
        elif kind == "sin" and l > 0:
            b[l] = amplitude
        else:
            raise ValueError(f"bad mode {kind}({l})")
        return cls(a, b, prec)

    @classmethod
    def random(cls, M: int, rng: np.random.Generator, prec: int = DOUBLE):
        if is_double(prec):
            a, b = rng.standard_normal(M + 1), rng.standard_normal(M + 1)
            b[0] = 0.0
            return cls(a, b, prec)
        # second draw fills bits beyond double so coefficients use the full precision
        with working(prec):
            def draw():
                hi, lo = rng.standard_normal(2)
                return mpmath.mpf(hi) + mpmath.ldexp(mpmath.mpf(lo), -60)

            a = np.array([draw() for _ in range(M + 1)], dtype=object)
            b = np.array([mpmath.mpf(0)] + [draw() for _ in range(M)], dtype=object)
        return cls(a, b, prec)

    def multiply_modes(self, weights) -> "FourierFunction":
        """Scale mode ``l`` (both cosine and sine) by ``weights[l]``."""
        with working(self.prec):
            w = np.asarray(weights)
            return FourierFunction(self.a * w, self.b * w, self.prec)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        modes = np.arange(self.M + 1)
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        return np.cos(np.multiply.outer(t, modes)) @ a + np.sin(np.multiply.outer(t, modes)) @ b

    def samples(self, count: int = 64) -> np.ndarray:
        return self(2 * np.pi * np.arange(count) / count)

    @classmethod
    def from_samples(cls, values, M: int):
        """Least-squares-exact coefficients from equispaced samples (``len > 2 M``)."""
        values = np.asarray(values, dtype=float)
        count = values.size
        if count <= 2 * M:
            raise InvalidSizeError(f"need more than {2 * M} samples for {M} modes")
        spec = np.fft.rfft(values) / count
        a = 2 * spec.real[: M + 1]
        b = -2 * spec.imag[: M + 1]
        a[0] = spec.real[0]
        b[0] = 0.0
        return cls(a, b)

    def coefficients(self) -> np.ndarray:
        return np.concatenate([self.a, self.b[1:]])


def dtn_continuous(f: FourierFunction) -> FourierFunction:
    return f.multiply_modes(np.arange(f.M + 1))


def minus_second_derivative(f: FourierFunction) -> FourierFunction:
    return f.multiply_modes(np.arange(f.M + 1) ** 2)


def verify_continuum_identity(f: FourierFunction):
    """Largest coefficient gap between DtN applied twice and ``-f''``."""
    twice = dtn_continuous(dtn_continuous(f))
    direct = minus_second_derivative(f)
    with working(f.prec):
        return absmax(twice.coefficients() - direct.coefficients())


def discrete_vs_continuous(n: int, m: int, prec: int = DOUBLE):
    """Mode-``m`` eigenvalue of ``sqrt(L) / h`` and its relative gap to ``m``.

    Returns ``(normalized, rel_error)`` where ``normalized`` equals
    ``(n / pi) sin(pi m / n)`` up to roundoff.
    """
    if not 1 <= m < n / 2:
        raise InvalidSizeError(f"mode {m} outside 1 <= m < n/2 for n={n}")
    eig = spectrum(sqrt_psd(minus_laplacian(n, prec)))[m]
    with working(prec):
        pi = np.pi if is_double(prec) else mpmath.pi
        normalized = eig * n / (2 * pi)
        return normalized, abs(normalized - m) / m


def convergence_order(m: int, ns=(25, 101, 401, 1601)) -> float:
    """Least-squares slope of log relative error against log n at fixed ``m``."""
    errors = [float(discrete_vs_continuous(n, m)[1]) for n in ns]
    slope, _ = np.polyfit(np.log(ns), np.log(errors), 1)
    return float(slope)
