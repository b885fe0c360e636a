"""The finite continued fraction

    beta(lambda) = c_k lambda + 1/(c_{k-1} lambda + 1/(... + 1/(c_1 lambda)))

with the coefficients

    c_l = (w^l + w^-l) / (w^l - w^-l),      w = exp(i pi / (2k + 1)),

which satisfy ``beta(lambda_l) = 1`` at ``lambda_l = w^l - w^-l`` for
``l = 1..k``.  Coefficients are stored innermost first: ``c[0]`` is ``c_1``
and ``c[-1]`` is ``c_k``.

All arithmetic uses mpmath at an explicit precision in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .errors import (
    DegenerateFractionError,
    ExpansionFailureError,
    InvalidSizeError,
    PoleEncounteredError,
    RecoverySingularError,
)
from .precision import DOUBLE, check_precision

HIGH = 200


def default_precision(k: int) -> int:
    """53 bits up to 40 floors, 200 bits beyond."""
    return DOUBLE if k <= 40 else HIGH


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise InvalidSizeError(f"number of floors must be a positive integer, got {k}")
    return int(k)


def _prec(k, prec):
    return check_precision(default_precision(k) if prec is None else prec)


@dataclass(frozen=True)
class ContFracCoeffs:
    c: tuple
    prec: int = DOUBLE

    def __post_init__(self):
        _check_k(len(self.c))
        with mpmath.workprec(self.prec):
            object.__setattr__(self, "c", tuple(mpmath.mpc(v) for v in self.c))

    @property
    def k(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class LambdaPoints:
    k: int
    lam: tuple
    prec: int = DOUBLE


def _w_power(l: int, k: int):
    # w^l on the unit circle; w^-l is its exact conjugate
    return mpmath.expjpi(mpmath.mpf(l) / (2 * k + 1))


def conjecture_coeffs(k: int, prec: int | None = None) -> ContFracCoeffs:
    k = _check_k(k)
    prec = _prec(k, prec)
    with mpmath.workprec(prec):
        c = []
        for l in range(1, k + 1):
            wl = _w_power(l, k)
            c.append((wl + mpmath.conj(wl)) / (wl - mpmath.conj(wl)))
    return ContFracCoeffs(tuple(c), prec)


def lambda_points(k: int, prec: int | None = None) -> LambdaPoints:
    """``lambda_l = w^l - w^-l = 2i sin(l pi / (2k + 1))`` for ``l = 1..k``."""
    k = _check_k(k)
    prec = _prec(k, prec)
    with mpmath.workprec(prec):
        lam = []
        for l in range(1, k + 1):
            wl = _w_power(l, k)
            lam.append(wl - mpmath.conj(wl))
    return LambdaPoints(k, tuple(lam), prec)


def _pole_floor(term, prec):
    return mpmath.ldexp(1, 10 - prec) * max(1, abs(term))


def eval_beta(coeffs: ContFracCoeffs | Sequence, lam, prec: int | None = None):
    """Evaluate the continued fraction bottom-up.

    Raises :class:`PoleEncounteredError` when a partial value is too close
    to zero to invert, i.e. ``|t| < 2**(10 - p) * max(1, |c_j lambda|)``
    where ``c_j lambda`` is the term that produced it.
    """
    if not isinstance(coeffs, ContFracCoeffs):
        coeffs = ContFracCoeffs(tuple(coeffs), DOUBLE if prec is None else prec)
    prec = coeffs.prec if prec is None else check_precision(prec)
    with mpmath.workprec(prec):
        lam = mpmath.mpmathify(lam)
        term = coeffs.c[0] * lam
        t = term
        for j in range(1, coeffs.k):
            if abs(t) < _pole_floor(term, prec):
                raise PoleEncounteredError(f"partial value vanishes at floor {j}", floor=j)
            term = coeffs.c[j] * lam
            t = term + 1 / t
        return t


def eval_real(terms: Sequence, prec: int = DOUBLE):
    """Real continued fraction ``x_k + 1/(x_{k-1} + ... + 1/x_1)``, innermost first."""
    with mpmath.workprec(prec):
        t = mpmath.mpf(terms[0])
        for j in range(1, len(terms)):
            if abs(t) < _pole_floor(terms[j - 1], prec):
                raise PoleEncounteredError(f"partial value vanishes at floor {j}", floor=j)
            t = terms[j] + 1 / t
        return t


def real_terms(k: int, l: int, prec: int | None = None) -> list:
    """The real products ``c_j lambda_l = 2 cot(j theta) sin(l theta)``, ``theta = pi/(2k+1)``."""
    k = _check_k(k)
    if not 1 <= l <= k:
        raise InvalidSizeError(f"l must lie in 1..{k}, got {l}")
    prec = _prec(k, prec)
    with mpmath.workprec(prec):
        s = 2 * mpmath.sinpi(mpmath.mpf(l) / (2 * k + 1))
        return [mpmath.cot(mpmath.pi * j / (2 * k + 1)) * s for j in range(1, k + 1)]


@dataclass
class ConjectureReport:
    k: int
    prec: int
    tol: float
    residuals: list
    errors: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        finite = [r for r in self.residuals if r is not None]
        if len(finite) < len(self.residuals):
            return None
        return max(finite)

    @property
    def passed_per_l(self) -> list[bool]:
        return [r is not None and r <= self.tol for r in self.residuals]

    @property
    def passed(self) -> bool:
        return all(self.passed_per_l)


def verify_conjecture(k: int, prec: int | None = None, tol: float = 1e-8) -> ConjectureReport:
    """Residuals ``|beta(lambda_l) - 1|`` for ``l = 1..k`` (``None`` where a pole was hit)."""
    k = _check_k(k)
    prec = _prec(k, prec)
    coeffs = conjecture_coeffs(k, prec)
    points = lambda_points(k, prec)
    residuals, errors = [], {}
    for l, lam in enumerate(points.lam, start=1):
        try:
            value = eval_beta(coeffs, lam)
        except PoleEncounteredError as exc:
            residuals.append(None)
            errors[l] = str(exc)
            continue
        with mpmath.workprec(prec):
            residuals.append(abs(value - 1))
    return ConjectureReport(k, prec, tol, residuals, errors)


# --- rational form -------------------------------------------------------------


@dataclass(frozen=True)
class OddEvenRational:
    """``beta = p / q`` with ``p`` and ``q`` of opposite parity.

    ``p`` and ``q`` are ascending coefficient tuples (index = power of lambda);
    ``p`` has the parity of ``k`` and degree ``k``, ``q`` degree ``k - 1``.
    """

    p: tuple
    q: tuple
    prec: int = DOUBLE

    @property
    def p_degree(self) -> int:
        return len(self.p) - 1

    @property
    def q_degree(self) -> int:
        return len(self.q) - 1

    def numerator(self, lam):
        with mpmath.workprec(self.prec):
            return mpmath.polyval(list(reversed(self.p)), lam)

    def denominator(self, lam):
        with mpmath.workprec(self.prec):
            return mpmath.polyval(list(reversed(self.q)), lam)

    def __call__(self, lam):
        with mpmath.workprec(self.prec):
            return self.numerator(lam) / self.denominator(lam)


def _poly_add(a, b):
    size = max(len(a), len(b))
    a = list(a) + [0] * (size - len(a))
    b = list(b) + [0] * (size - len(b))
    return [x + y for x, y in zip(a, b)]


def beta_rational(coeffs: ContFracCoeffs) -> OddEvenRational:
    """Collapse the fraction into ``p / q`` via ``(p, q) <- (c_j lambda p + q, p)``."""
    with mpmath.workprec(coeffs.prec):
        if any(c == 0 for c in coeffs.c):
            raise DegenerateFractionError("zero coefficient makes the fraction degenerate")
        p, q = [mpmath.mpc(0), coeffs.c[0]], [mpmath.mpc(1)]
        for c in coeffs.c[1:]:
            shifted = [mpmath.mpc(0)] + [c * a for a in p]
            p, q = _poly_add(shifted, q), p
    return OddEvenRational(tuple(p), tuple(q), coeffs.prec)


@dataclass
class LineCheckReport:
    p_degree: int
    q_degree: int
    p_sign_changes: int
    q_sign_changes: int
    interlaced: bool
    max_imag_ratio: float
    axis: str = "imaginary"
    span: float = 3.0

    @property
    def passed(self) -> bool:
        return self.p_sign_changes == self.p_degree and self.q_sign_changes == self.q_degree


_AXES = {"imaginary": 1j, "real": 1}


def _on_axis(poly, ts, direction, prec):
    # values of poly(direction * t) rotated by the phase of the leading term,
    # so a polynomial whose terms all share that phase becomes real
    deg = len(poly) - 1
    with mpmath.workprec(prec):
        direction = mpmath.mpc(direction)
        lead = poly[deg] * direction**deg
        phase = lead / abs(lead)
        coeffs = list(reversed(poly))
        vals = [mpmath.polyval(coeffs, direction * t) / phase for t in ts]
        re = np.array([float(v.real) for v in vals])
        im = np.array([float(v.imag) for v in vals])
    return re, im


def _sign_change_points(vals, ts):
    keep = vals != 0
    s, t = np.sign(vals[keep]), ts[keep]
    idx = np.nonzero(s[1:] != s[:-1])[0]
    return 0.5 * (t[idx] + t[idx + 1])


def root_bound(poly) -> float:
    """Fujiwara bound ``2 max_i |a_{deg-i} / a_deg|^(1/i)`` on root moduli."""
    deg = len(poly) - 1
    lead = abs(poly[-1])
    terms = [float(abs(poly[deg - i]) / lead) ** (1.0 / i) for i in range(1, deg + 1)]
    return 2 * max(terms, default=0.5)


def line_check(
    r: OddEvenRational,
    grid_size: int = 2048,
    span: float | None = 3.0,
    axis: str = "imaginary",
) -> LineCheckReport:
    """Grid evidence that the zeros of ``p`` and ``q`` lie on one line through 0.

    ``p`` and ``q`` are sampled at ``lambda = d * t`` for ``grid_size`` points
    ``t`` in ``[-span, span]``, with ``d = i`` (``axis="imaginary"``) or
    ``d = 1`` (``axis="real"``).  The check passes when each polynomial
    changes sign as many times as its degree.  ``span=None`` uses the Fujiwara
    root bound of both polynomials.  This is evidence, not root isolation.

    With purely imaginary coefficients, as produced by
    :func:`conjecture_coeffs`, the zeros lie on the real axis.
    """
    if grid_size < 64:
        raise InvalidSizeError("grid_size must be at least 64")
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {sorted(_AXES)}, got {axis!r}")
    if span is None:
        span = max(root_bound(r.p), root_bound(r.q))
    ts = np.linspace(-span, span, grid_size)
    p_re, p_im = _on_axis(r.p, ts, _AXES[axis], r.prec)
    q_re, q_im = _on_axis(r.q, ts, _AXES[axis], r.prec)
    p_roots = _sign_change_points(p_re, ts)
    q_roots = _sign_change_points(q_re, ts)
    merged = sorted([(t, 0) for t in p_roots] + [(t, 1) for t in q_roots])
    interlaced = all(a[1] != b[1] for a, b in zip(merged, merged[1:]))
    ratio = max(
        float(np.max(np.abs(p_im)) / max(np.max(np.abs(p_re)), 1e-300)),
        float(np.max(np.abs(q_im)) / max(np.max(np.abs(q_re)), 1e-300)),
    )
    return LineCheckReport(
        r.p_degree, r.q_degree, len(p_roots), len(q_roots), interlaced, ratio, axis, float(span)
    )


# --- coefficient recovery ------------------------------------------------------


def _interpolate_rational(k: int, points, prec: int):
    """Solve ``num(lambda_l) = den(lambda_l)`` for a (k, k-1) odd/even pair.

    The polynomial of even degree is normalised to constant term 1.
    Returns ascending coefficient lists ``(num, den)``.
    """
    num_degs = list(range(k % 2, k + 1, 2))
    den_degs = list(range((k - 1) % 2, k, 2))
    unknowns = [("num", d) for d in num_degs] + [("den", d) for d in den_degs]
    pinned = ("num", 0) if k % 2 == 0 else ("den", 0)
    unknowns.remove(pinned)
    with mpmath.workprec(prec):
        a = mpmath.matrix(k, k)
        rhs = mpmath.matrix(k, 1)
        for row, lam in enumerate(points):
            for col, (which, d) in enumerate(unknowns):
                a[row, col] = lam**d if which == "num" else -(lam**d)
            rhs[row] = -1 if pinned[0] == "num" else 1
        try:
            sol = mpmath.lu_solve(a, rhs)
        except ZeroDivisionError as exc:
            raise RecoverySingularError("interpolation system is singular") from exc
        num = [mpmath.mpc(0)] * (k + 1)
        den = [mpmath.mpc(0)] * k
        (num if pinned[0] == "num" else den)[0] = mpmath.mpc(1)
        for (which, d), value in zip(unknowns, sol):
            (num if which == "num" else den)[d] = value
    return num, den


def expand_fraction(num, den, prec: int) -> list:
    """Peel ``num/den = c lambda + 1/(den/r)`` repeatedly; returns ``c_1..c_k``.

    ``num`` has degree one more than ``den`` and the opposite parity.  At
    each step the remainder ``r`` must have degree ``deg(den) - 1``; a
    vanishing leading coefficient raises :class:`ExpansionFailureError`.
    """
    outer_first = []
    with mpmath.workprec(prec):
        eps = mpmath.ldexp(1, 20 - prec)
        num, den = list(num), list(den)
        while True:
            d = len(num) - 1
            if len(den) != d:
                raise ExpansionFailureError(f"degrees {d} and {len(den) - 1} do not differ by one")
            if abs(den[-1]) == 0:
                raise ExpansionFailureError(f"denominator of degree {d - 1} has zero leading term")
            c = num[d] / den[d - 1]
            outer_first.append(c)
            if d == 1:
                break
            # r = num - c*lambda*den, whose degree-d term cancels by construction
            rem = [num[i] - (c * den[i - 1] if i >= 1 else 0) for i in range(d - 1)]
            scale = max(abs(v) for v in num)
            if abs(rem[d - 2]) <= eps * scale:
                raise ExpansionFailureError(f"remainder lost its degree-{d - 2} term")
            num, den = den, rem
    return list(reversed(outer_first))


def recover_coeffs(k: int, prec: int | None = None) -> ContFracCoeffs:
    """Recover ``c_1..c_k`` from the conditions ``beta(lambda_l) = 1`` alone.

    Fits an odd/even rational function through the ``k`` unit-value
    conditions, then expands it back into continued-fraction form by
    polynomial division.  The closed-form coefficients are not used.
    """
    k = _check_k(k)
    prec = _prec(k, prec)
    points = lambda_points(k, prec).lam
    num, den = _interpolate_rational(k, points, prec)
    return ContFracCoeffs(tuple(expand_fraction(num, den, prec)), prec)
