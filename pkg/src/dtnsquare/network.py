"""The layered cylinder network and its Dirichlet-to-Neumann map.

Vertices are ``S x {1, 2, ...}`` with ``|S| = n``; vertex ``i`` of layer ``j``
is joined by unit conductors to vertices ``i`` and ``i + 1`` (mod n) of layer
``j + 1``.  Layer 1 is the boundary.  Eliminating everything below layer 1
layer by layer gives the map

    T(X) = 2I - B^T (X + 2I)^{-1} B,

where ``X`` is the DtN map of the network hanging below layer 2 (seen from
layer 2) and ``B`` is :func:`~dtnsquare.circulant.adjacency_B`.

Depth convention: ``depth`` counts the interior layers below the boundary.
A finite network of depth ``d`` therefore has ``d + 1`` vertex layers.  With
``Insulated`` termination nothing hangs below the last layer, so the DtN map
is ``T^d(0)``; with ``Grounded`` termination a further layer held at zero
potential is attached, giving ``T^d(2I)``.  The Grounded constant-mode symbol
is then exactly ``2 / (d + 1)`` and the fixed-point iterates started at
``2I`` coincide with Grounded truncations.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .circulant import (
    Circulant,
    SymCirculant,
    adjacency_B,
    from_spectrum,
    max_norm,
    minus_laplacian,
    spectrum,
    sqrt_psd,
)
from .errors import (
    EliminationSingularityError,
    InvalidSizeError,
    NonConvergenceError,
    UnsupportedParameterError,
)
from .precision import DOUBLE, is_double, unit_roundoff, working

INFINITE = math.inf


class Termination(enum.Enum):
    GROUNDED = "grounded"
    INSULATED = "insulated"


class Provenance(enum.Enum):
    SCHUR = "schur"
    PER_MODE = "per_mode"
    FIXED_POINT = "fixed_point"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class CylinderNetwork:
    n: int
    depth: int | float = INFINITE
    termination: Termination = Termination.INSULATED
    conductivity: float = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise InvalidSizeError(f"need at least 3 boundary vertices, got {self.n}")
        if self.depth != INFINITE and (int(self.depth) != self.depth or self.depth < 1):
            raise InvalidSizeError(f"depth must be a positive integer or INFINITE, got {self.depth}")
        if self.conductivity != 1:
            raise UnsupportedParameterError("only unit conductivity is supported")
        object.__setattr__(self, "termination", Termination(self.termination))

    @property
    def finite(self) -> bool:
        return self.depth != INFINITE

    def layers(self) -> int:
        """Number of vertex layers including the boundary (finite networks only)."""
        self._require_finite()
        return int(self.depth) + 1

    def edges(self):
        """Conductor list ``((layer, i), (layer + 1, i'))`` with 1-based layers.

        For Grounded networks the edges into the grounded layer are included;
        that layer has index ``layers() + 1``.
        """
        self._require_finite()
        last = self.layers() if self.termination is Termination.INSULATED else self.layers() + 1
        return [
            ((j, i), (j + 1, (i + s) % self.n))
            for j in range(1, last)
            for i in range(self.n)
            for s in (0, 1)
        ]

    def _require_finite(self):
        if not self.finite:
            raise InvalidSizeError("operation needs a finite network")


@dataclass(frozen=True)
class DtNMap:
    matrix: SymCirculant
    provenance: Provenance
    iterations: int | None = None

    @property
    def n(self) -> int:
        return self.matrix.n


def _seed(n: int, termination: Termination, prec: int) -> SymCirculant:
    if termination is Termination.GROUNDED:
        return SymCirculant.identity(n, 2, prec)
    return SymCirculant.identity(n, 0, prec)


def _inverse(c: SymCirculant) -> SymCirculant:
    mu = spectrum(c)
    with working(c.prec):
        floor = 2 ** 10 * unit_roundoff(c.prec) * max(1, max_norm(c))
        if min(abs(v) for v in mu) <= floor:
            raise EliminationSingularityError("interior block is numerically singular")
        inv = 1 / mu
    return from_spectrum(inv, c.prec, symmetric=True)


def schur_step(x: SymCirculant) -> SymCirculant:
    """One layer of elimination: ``T(X) = 2I - B^T (X + 2I)^{-1} B``."""
    n, prec = x.n, x.prec
    b = adjacency_B(n, prec)
    two = SymCirculant.identity(n, 2, prec)
    inner = _inverse(x + two)
    reduced = b.T @ inner @ b
    return two - SymCirculant(reduced.row, prec)


def dtn_truncated(net: CylinderNetwork, prec: int = DOUBLE) -> DtNMap:
    """DtN map of a finite network by layer-by-layer Schur elimination."""
    net._require_finite()
    x = _seed(net.n, net.termination, prec)
    for _ in range(int(net.depth)):
        x = schur_step(x)
    return DtNMap(x, Provenance.SCHUR)


_RATIONAL_COS = {
    Fraction(0): Fraction(1),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(1, 4): Fraction(0),
    Fraction(1, 3): Fraction(-1, 2),
    Fraction(1, 2): Fraction(-1),
    Fraction(2, 3): Fraction(-1, 2),
    Fraction(3, 4): Fraction(0),
    Fraction(5, 6): Fraction(1, 2),
}


def coupling_symbol(n: int, m: int, prec: int = DOUBLE, exact: bool = False):
    """Eigenvalue ``2 + 2 cos(2 pi m / n)`` of ``B^T B`` on mode ``m``.

    With ``exact=True`` the value is returned as a :class:`Fraction`; this is
    only possible when the cosine is rational.
    """
    if exact:
        turn = Fraction(m, n) % 1
        if turn not in _RATIONAL_COS:
            raise ValueError(f"mode {m} of {n} has an irrational symbol")
        return 2 + 2 * _RATIONAL_COS[turn]
    if is_double(prec):
        return 2 + 2 * math.cos(2 * math.pi * m / n)
    with working(prec):
        return 2 + 2 * mpmath.cospi(mpmath.mpf(2 * m) / n)


def mode_recursion(mu, depth: int, termination: Termination):
    """Iterate the scalar map ``x -> 2 - mu / (x + 2)`` ``depth`` times.

    Works for any numeric type closed under field operations, including
    :class:`Fraction`.
    """
    x = mu * 0 + (2 if Termination(termination) is Termination.GROUNDED else 0)
    for _ in range(depth):
        x = 2 - mu / (x + 2)
    return x


def dtn_per_mode(net: CylinderNetwork, m: int, prec: int = DOUBLE, exact: bool = False):
    """Eigenvalue of :func:`dtn_truncated` on Fourier mode ``m``."""
    net._require_finite()
    if not 0 <= m < net.n:
        raise InvalidSizeError(f"mode index must lie in [0, {net.n}), got {m}")
    mu = coupling_symbol(net.n, m, prec, exact)
    with working(prec):
        return mode_recursion(mu, int(net.depth), net.termination)


def dtn_per_mode_map(net: CylinderNetwork, prec: int = DOUBLE) -> DtNMap:
    symbols = [dtn_per_mode(net, m, prec) for m in range(net.n)]
    return DtNMap(from_spectrum(np.array(symbols), prec, symmetric=True), Provenance.PER_MODE)


def _deflate(x: SymCirculant) -> SymCirculant:
    # pin the constant-vector eigenvalue (the row sum) to zero
    with working(x.prec):
        return SymCirculant(x.row - x.row_sums() / x.n, x.prec)


def dtn_fixed_point(
    n: int,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    deflate_constant: bool = True,
    prec: int = DOUBLE,
) -> DtNMap:
    """Iterate ``X <- T(X)`` from ``X = 2I`` until successive iterates differ by < ``tol``.

    Without deflation the constant mode decays only like ``2 / (j + 1)``, so
    small tolerances end in :class:`NonConvergenceError`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = SymCirculant.identity(n, 2, prec)
    residual = math.inf
    for it in range(1, max_iter + 1):
        nxt = schur_step(x)
        if deflate_constant:
            nxt = _deflate(nxt)
        residual = max_norm(nxt - x)
        x = nxt
        if residual < tol:
            return DtNMap(x, Provenance.FIXED_POINT, iterations=it)
    raise NonConvergenceError(
        f"no convergence after {max_iter} iterations (last step {float(residual):.3e})",
        residual=residual,
        iterations=max_iter,
        last=x,
    )


def dtn_infinite_closed_form(n: int, prec: int = DOUBLE) -> DtNMap:
    """Principal square root of ``4I - B B^T``."""
    b = adjacency_B(n, prec)
    target = SymCirculant.identity(n, 4, prec) - SymCirculant((b @ b.T).row, prec)
    return DtNMap(sqrt_psd(target), Provenance.CLOSED_FORM)


def fixed_point_residual(lam: SymCirculant):
    """``max|Lambda - T(Lambda)|``."""
    return max_norm(lam - schur_step(lam))


# --- brute-force oracle -------------------------------------------------------


def assemble_laplacian(net: CylinderNetwork) -> np.ndarray:
    """Dense weighted Laplacian of a finite network, boundary layer first.

    Vertex ``(layer, i)`` has index ``(layer - 1) * n + i``.  A grounded
    layer is not represented by unknowns; its edges only add to the degree of
    the vertices above it.
    """
    size = net.layers() * net.n
    lap = np.zeros((size, size))
    for (ja, ia), (jb, ib) in net.edges():
        a = (ja - 1) * net.n + ia
        lap[a, a] += net.conductivity
        if jb > net.layers():
            continue
        b = (jb - 1) * net.n + ib
        lap[b, b] += net.conductivity
        lap[a, b] -= net.conductivity
        lap[b, a] -= net.conductivity
    return lap


def kron_reduce(lap: np.ndarray, boundary) -> np.ndarray:
    """Schur complement of a dense Laplacian onto the ``boundary`` indices."""
    boundary = np.asarray(boundary)
    interior = np.setdiff1d(np.arange(lap.shape[0]), boundary)
    kbb = lap[np.ix_(boundary, boundary)]
    if interior.size == 0:
        return kbb.copy()
    kbi = lap[np.ix_(boundary, interior)]
    kii = lap[np.ix_(interior, interior)]
    return kbb - kbi @ np.linalg.solve(kii, kbi.T)


def dtn_brute_force(net: CylinderNetwork) -> np.ndarray:
    return kron_reduce(assemble_laplacian(net), np.arange(net.n))


# --- theorem check -------------------------------------------------------------


@dataclass
class RouteResult:
    route: Provenance
    residual: float | None
    passed: bool
    iterations: int | None = None
    error: str | None = None
    matrix: SymCirculant | None = field(default=None, repr=False)


@dataclass
class Discrepancy:
    first: Provenance
    second: Provenance
    value: float
    passed: bool


@dataclass
class Theorem41Report:
    n: int
    tol: float
    routes: list[RouteResult]
    discrepancies: list[Discrepancy]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.routes) and all(d.passed for d in self.discrepancies)


ALL_ROUTES = (Provenance.FIXED_POINT, Provenance.SCHUR, Provenance.PER_MODE, Provenance.CLOSED_FORM)


def _compute_route(route, n, depth, termination, fp_tol, max_iter, prec) -> DtNMap:
    if route is Provenance.CLOSED_FORM:
        return dtn_infinite_closed_form(n, prec)
    if route is Provenance.FIXED_POINT:
        return dtn_fixed_point(n, fp_tol, max_iter, deflate_constant=True, prec=prec)
    net = CylinderNetwork(n, depth, termination)
    if route is Provenance.SCHUR:
        return dtn_truncated(net, prec)
    return dtn_per_mode_map(net, prec)


def verify_theorem41(
    n: int,
    routes=ALL_ROUTES,
    tol: float = 1e-6,
    depth: int = 400,
    termination: Termination = Termination.INSULATED,
    fp_tol: float = 1e-10,
    max_iter: int = 10_000,
    prec: int = DOUBLE,
) -> Theorem41Report:
    """Check ``Lambda^2 = L`` along each requested route and compare routes pairwise.

    A route that raises (for example a non-converging fixed point) is
    recorded as failed with its error message rather than propagated, so the
    other routes are still reported.
    """
    if int(n) != n or n < 3:
        raise InvalidSizeError(f"need n >= 3, got {n}")
    lap = minus_laplacian(n, prec)
    results = []
    for route in dict.fromkeys(Provenance(r) for r in routes):
        try:
            dtn = _compute_route(route, n, depth, termination, fp_tol, max_iter, prec)
        except NonConvergenceError as exc:
            results.append(RouteResult(route, None, False, exc.iterations, str(exc)))
            continue
        residual = float(max_norm(dtn.matrix @ dtn.matrix - lap))
        results.append(
            RouteResult(route, residual, residual <= tol, dtn.iterations, matrix=dtn.matrix)
        )
    discrepancies = []
    done = [r for r in results if r.matrix is not None]
    for a, b in itertools.combinations(done, 2):
        gap = float(max_norm(a.matrix - b.matrix))
        discrepancies.append(Discrepancy(a.route, b.route, gap, gap <= tol))
    return Theorem41Report(n, tol, results, discrepancies)
