"""Matrix-valued measures on the real line.

A measure consists of finitely many atoms (point, Hermitian PSD weight)
plus finitely many intervals carrying a constant Hermitian PSD density
with respect to Lebesgue measure.  All the kernels the library needs
integrate in closed form against such measures, so no quadrature is
involved anywhere: divergence is decided analytically (a kernel pole
meeting the support), never by numeric overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLS, Tolerances


class MeasureError(ValueError):
    """Invalid measure data (non-PSD weight, overlapping pieces, ...)."""


class DefinedNowhereError(ValueError):
    """Requested a density value at a point carrying no mass."""


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.linalg.norm(a)))
    return float(np.linalg.norm(a - a.conj().T)) <= tol * scale


def is_psd(a: np.ndarray, rank_tol: float) -> bool:
    if not is_hermitian(a):
        return False
    w = np.linalg.eigvalsh(hermitian_part(a))
    scale = max(1.0, float(abs(w).max(initial=0.0)))
    return bool(w.min(initial=0.0) >= -rank_tol * scale)


def matrix_rank(a: np.ndarray, rank_tol: float) -> int:
    w = np.abs(np.linalg.eigvalsh(hermitian_part(a)))
    top = w.max(initial=0.0)
    if top == 0.0:
        return 0
    return int(np.count_nonzero(w > rank_tol * top))


def _as_matrix(m, n: int, what: str) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (n, n):
        raise MeasureError(f"{what}: expected {n}x{n} matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Interval:
    """Bounded interval with endpoint-inclusion flags."""

    a: float
    b: float
    include_a: bool = True
    include_b: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise MeasureError("interval endpoints must be finite")
        if self.a > self.b:
            raise MeasureError(f"interval [{self.a}, {self.b}] has a > b")

    def contains(self, x: float) -> bool:
        if self.a < x < self.b:
            return True
        if x == self.a and self.include_a:
            return True
        if x == self.b and self.include_b:
            return True
        return False

    def overlap_length(self, a: float, b: float) -> float:
        return max(0.0, min(self.b, b) - max(self.a, a))


class IntervalUnion:
    """Finite union of bounded intervals; the only Borel sets supported."""

    def __init__(self, intervals: Sequence[Interval]):
        self.intervals = tuple(intervals)

    @classmethod
    def of(cls, *specs) -> "IntervalUnion":
        """Build from (a, b) or (a, b, incl_a, incl_b) tuples or Intervals."""
        out = []
        for s in specs:
            if isinstance(s, Interval):
                out.append(s)
            else:
                out.append(Interval(*s))
        return cls(out)

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    def overlap_length(self, a: float, b: float) -> float:
        """Lebesgue measure of (union) ∩ [a, b]; merges overlaps."""
        segs = sorted((iv.a, iv.b) for iv in self.intervals if iv.b > iv.a)
        total = 0.0
        cur_a = cur_b = None
        for s, e in segs:
            if cur_b is None or s > cur_b:
                if cur_b is not None:
                    total += max(0.0, min(cur_b, b) - max(cur_a, a))
                cur_a, cur_b = s, e
            else:
                cur_b = max(cur_b, e)
        if cur_b is not None:
            total += max(0.0, min(cur_b, b) - max(cur_a, a))
        return total


@dataclass(frozen=True)
class Atom:
    """Point mass: Hermitian PSD weight W sitting at x."""

    x: float
    W: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.W, dtype=complex)
        w.setflags(write=False)
        object.__setattr__(self, "W", w)


@dataclass(frozen=True)
class ACPiece:
    """Constant Hermitian PSD density rho on [a, b] w.r.t. Lebesgue measure."""

    a: float
    b: float
    rho: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=complex)
        r.setflags(write=False)
        object.__setattr__(self, "rho", r)


@dataclass(frozen=True)
class DensityMatrixValue:
    """Trace-normalized mass direction at a point, with its rank."""

    t: float
    psi: np.ndarray
    multiplicity: int


@dataclass(frozen=True)
class Divergent:
    """Marker for a matrix integral that diverges along some directions.

    ``directions`` holds the 0-based canonical-basis indices i for which
    the scalar integral against mu_ii diverges.
    """

    directions: tuple

    def __bool__(self):  # never truthy-usable as a matrix by accident
        raise TypeError("Divergent result used as a value")


def is_divergent(v) -> bool:
    return isinstance(v, Divergent)


class MatrixMeasure:
    """Nontrivial matrix-valued measure: atoms plus constant-density pieces."""

    def __init__(self, dim: int, atoms: Sequence[Atom] = (),
                 ac_pieces: Sequence[ACPiece] = (),
                 tols: Tolerances = DEFAULT_TOLS):
        if dim < 1:
            raise MeasureError("dim must be a positive integer")
        self.dim = int(dim)
        self.tols = tols
        self.atoms = tuple(sorted(atoms, key=lambda at: at.x))
        self.ac_pieces = tuple(sorted(ac_pieces, key=lambda p: p.a))
        self._validate()

    def _validate(self):
        n, rt = self.dim, self.tols.rank_tol
        for k, at in enumerate(self.atoms):
            w = _as_matrix(at.W, n, f"atoms[{k}].W")
            if not is_psd(w, rt):
                raise MeasureError(f"atoms[{k}].W is not Hermitian positive semidefinite")
        for k, pc in enumerate(self.ac_pieces):
            r = _as_matrix(pc.rho, n, f"ac[{k}].rho")
            if not pc.a < pc.b:
                raise MeasureError(f"ac[{k}]: requires a < b, got [{pc.a}, {pc.b}]")
            if not is_psd(r, rt):
                raise MeasureError(f"ac[{k}].rho is not Hermitian positive semidefinite")
        pts = [at.x for at in self.atoms]
        for i in range(1, len(pts)):
            if abs(pts[i] - pts[i - 1]) <= self.tols.tol_x:
                raise MeasureError(f"atom points {pts[i - 1]} and {pts[i]} coincide")
        for i in range(1, len(self.ac_pieces)):
            if self.ac_pieces[i].a < self.ac_pieces[i - 1].b - self.tols.tol_x:
                raise MeasureError("ac pieces have overlapping interiors")
        total = sum(float(np.trace(at.W).real) for at in self.atoms)
        total += sum(float(np.trace(pc.rho).real) * (pc.b - pc.a) for pc in self.ac_pieces)
        if total <= 0.0:
            raise MeasureError("measure is trivial (no mass anywhere)")

    # -- support queries -------------------------------------------------

    def atom_at(self, x: float):
        """Atom whose point is within tol_x of x, or None."""
        for at in self.atoms:
            if abs(at.x - x) <= self.tols.tol_x:
                return at
        return None

    def pieces_at(self, x: float):
        """Pieces whose closed support contains x (within tol_x)."""
        t = self.tols.tol_x
        return [pc for pc in self.ac_pieces if pc.a - t <= x <= pc.b + t]

    def on_support(self, x: float) -> bool:
        at = self.atom_at(x)
        if at is not None and float(np.trace(at.W).real) > 0.0:
            return True
        return any(float(np.trace(pc.rho).real) > 0.0 for pc in self.pieces_at(x))

    def support_bounds(self):
        lo = math.inf
        hi = -math.inf
        for at in self.atoms:
            lo, hi = min(lo, at.x), max(hi, at.x)
        for pc in self.ac_pieces:
            lo, hi = min(lo, pc.a), max(hi, pc.b)
        return lo, hi

    @property
    def purely_atomic(self) -> bool:
        return all(float(np.trace(pc.rho).real) == 0.0 for pc in self.ac_pieces)


# -- kernels -------------------------------------------------------------
#
# Each kernel evaluates pointwise (for atoms), integrates exactly over a
# segment (for constant-density pieces), and knows where it is singular.


class PoissonSquareKernel:
    """y -> 1/(x - y)^2; the integrand of the divergence matrix."""

    def __init__(self, x: float):
        self.x = float(x)

    def value(self, y: float):
        return 1.0 / (self.x - y) ** 2

    def segment(self, a: float, b: float):
        return 1.0 / (self.x - b) - 1.0 / (self.x - a)

    def singular_at_point(self, y: float, tol_x: float) -> bool:
        return abs(self.x - y) <= tol_x

    def singular_on_segment(self, a: float, b: float, tol_x: float) -> bool:
        return a - tol_x <= self.x <= b + tol_x


class RegularizedKernel:
    """y -> 1/((x - y)^2 + 1/m^2); everywhere finite."""

    def __init__(self, x: float, m: float):
        self.x = float(x)
        self.m = float(m)
        if self.m <= 0:
            raise ValueError("regularization level m must be positive")

    def value(self, y: float):
        return 1.0 / ((self.x - y) ** 2 + 1.0 / self.m ** 2)

    def segment(self, a: float, b: float):
        m, x = self.m, self.x
        return m * (math.atan(m * (b - x)) - math.atan(m * (a - x)))

    def singular_at_point(self, y, tol_x):
        return False

    def singular_on_segment(self, a, b, tol_x):
        return False


class CauchyKernel:
    """y -> 1/(y - z) - y/(1 + y^2), the Herglotz representation integrand.

    Works for complex z off the real axis and, as the boundary-value fast
    path, for real z off the support.
    """

    def __init__(self, z: complex):
        self.z = complex(z)

    @property
    def real_axis(self) -> bool:
        return self.z.imag == 0.0

    def value(self, y: float):
        return 1.0 / (y - self.z) - y / (1.0 + y * y)

    def segment(self, a: float, b: float):
        # The segment from a-z to b-z never crosses the branch cut when
        # Im z != 0; for real z off [a, b] the log argument is a positive real.
        v = np.log((b - self.z) / (a - self.z)) - 0.5 * math.log((1 + b * b) / (1 + a * a))
        return v.real if self.real_axis else v

    def singular_at_point(self, y: float, tol_x: float) -> bool:
        return self.real_axis and abs(self.z.real - y) <= tol_x

    def singular_on_segment(self, a: float, b: float, tol_x: float) -> bool:
        return self.real_axis and a - tol_x <= self.z.real <= b + tol_x


class InvOnePlusY2Kernel:
    """y -> 1/(1 + y^2); the integrability weight of the representation."""

    def value(self, y: float):
        return 1.0 / (1.0 + y * y)

    def segment(self, a: float, b: float):
        return math.atan(b) - math.atan(a)

    def singular_at_point(self, y, tol_x):
        return False

    def singular_on_segment(self, a, b, tol_x):
        return False


class IndicatorKernel:
    """Indicator of a finite interval union; reduces to measure_of_set."""

    def __init__(self, region: IntervalUnion):
        self.region = region

    def value(self, y: float):
        return 1.0 if self.region.contains(y) else 0.0

    def segment(self, a: float, b: float):
        return self.region.overlap_length(a, b)

    def singular_at_point(self, y, tol_x):
        return False

    def singular_on_segment(self, a, b, tol_x):
        return False


# -- operations ----------------------------------------------------------


def integrate(kernel, omega: MatrixMeasure):
    """Integrate a closed-form kernel against the measure.

    Returns the matrix, or a :class:`Divergent` carrying the 0-based
    directions i whose diagonal scalar integral against mu_ii diverges.
    Divergence is directional: a kernel pole sitting on an atom or inside
    a piece only kills the directions with nonzero diagonal mass there.
    """
    n = omega.dim
    tol_x = omega.tols.tol_x
    bad = set()
    for at in omega.atoms:
        if kernel.singular_at_point(at.x, tol_x):
            diag = np.real(np.diag(at.W))
            bad.update(int(i) for i in np.nonzero(diag > 0)[0])
    for pc in omega.ac_pieces:
        if kernel.singular_on_segment(pc.a, pc.b, tol_x):
            diag = np.real(np.diag(pc.rho))
            bad.update(int(i) for i in np.nonzero(diag > 0)[0])
    if bad:
        return Divergent(tuple(sorted(bad)))

    total = np.zeros((n, n), dtype=complex)
    for at in omega.atoms:
        total += kernel.value(at.x) * at.W
    for pc in omega.ac_pieces:
        total += kernel.segment(pc.a, pc.b) * pc.rho
    return total


def measure_of_set(omega: MatrixMeasure, region: IntervalUnion) -> np.ndarray:
    """Measure of a finite union of bounded intervals (Hermitian PSD)."""
    n = omega.dim
    total = np.zeros((n, n), dtype=complex)
    for at in omega.atoms:
        if region.contains(at.x):
            total += at.W
    for pc in omega.ac_pieces:
        total += region.overlap_length(pc.a, pc.b) * pc.rho
    return total


def trace_measure(omega: MatrixMeasure, region: IntervalUnion) -> float:
    """Trace measure of the region: sum of the diagonal scalar measures."""
    return float(np.trace(measure_of_set(omega, region)).real)


def density_matrix(omega: MatrixMeasure, t: float) -> DensityMatrixValue:
    """Trace-normalized density at t and its rank (the local multiplicity).

    At an atom the atom weight dominates the Radon-Nikodym derivative;
    inside a piece the constant density appears. Points with no trace mass
    have no density value.
    """
    at = omega.atom_at(t)
    if at is not None and float(np.trace(at.W).real) > 0.0:
        w = np.asarray(at.W)
        psi = w / np.trace(w).real
        return DensityMatrixValue(t, psi, matrix_rank(psi, omega.tols.rank_tol))
    for pc in omega.ac_pieces:
        if pc.a < t < pc.b and float(np.trace(pc.rho).real) > 0.0:
            rho = np.asarray(pc.rho)
            psi = rho / np.trace(rho).real
            return DensityMatrixValue(t, psi, matrix_rank(psi, omega.tols.rank_tol))
    raise DefinedNowhereError(f"no trace mass at t={t}")
