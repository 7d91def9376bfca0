"""Self-adjoint extensions parametrized by a Hermitian matrix.

Each extension disjoint from the reference one is carried solely by its
Hermitian parameter D; its Weyl function is M_D(z) = (D - M(z))^{-1}.
This module evaluates M_D, checks the two-parameter resolvent-type
identity, and decides whether a real energy is an eigenvalue of maximum
multiplicity:  T(x) finite and M(x+i0) = D, or equivalently (through any
second parameter D' with det(D - D') != 0) the boundary value of M_{D'}
equals (D' - D)^{-1} with the corresponding divergence integral finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .herglotz import (BoundaryReport, HerglotzMatrix, boundary_value,
                       evaluate, richardson_limit, t_matrix)
from .measure import Divergent, hermitian_part, is_divergent


class ConditioningError(np.linalg.LinAlgError):
    """A matrix that should be invertible is numerically singular."""


class PreconditionError(ValueError):
    """An operation precondition was violated."""


class InconsistencyError(RuntimeError):
    """Finite T(x) but no converged boundary value: a tolerance bug."""


@dataclass(frozen=True)
class ExtensionParameter:
    """Hermitian n x n matrix naming one self-adjoint extension."""

    D: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.D, dtype=complex)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"D must be square, got shape {d.shape}")
        if np.linalg.norm(d - d.conj().T) > 1e-12 * max(1.0, np.linalg.norm(d)):
            raise ValueError("D must be Hermitian")
        d.setflags(write=False)
        object.__setattr__(self, "D", d)

    @property
    def dim(self) -> int:
        return self.D.shape[0]


@dataclass
class MaxMultEvidence:
    """What the maximum-multiplicity criterion saw at one energy."""

    x: float
    t_value: Union[np.ndarray, Divergent]
    m_boundary: Optional[np.ndarray]
    residual: float
    verdict: bool

    @property
    def t_finite(self) -> bool:
        return not is_divergent(self.t_value)


def _coerce_d(d) -> np.ndarray:
    return d.D if isinstance(d, ExtensionParameter) else ExtensionParameter(np.asarray(d)).D


def _inv_checked(a: np.ndarray, what: str) -> np.ndarray:
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= 1e-13 * max(1.0, s[0]):
        raise ConditioningError(f"{what} is numerically singular (smallest sv {s[-1]:.3e})")
    return np.linalg.inv(a)


def weyl_of_extension(m: HerglotzMatrix, d, z: complex) -> np.ndarray:
    """M_D(z) = (D - M(z))^{-1} for z off the real axis."""
    D = _coerce_d(d)
    return _inv_checked(D - evaluate(m, z), "D - M(z)")


def extension_weyl(m: HerglotzMatrix, d):
    """The function z -> M_D(z) as a callable."""
    D = _coerce_d(d)
    return lambda z: _inv_checked(D - evaluate(m, z), "D - M(z)")


def resolvent_identity_residual(m: HerglotzMatrix, d, d_prime, z: complex) -> float:
    """Relative Frobenius defect of both composed forms of M_D via M_{D'}."""
    D, Dp = _coerce_d(d), _coerce_d(d_prime)
    n = D.shape[0]
    eye = np.eye(n)
    md = weyl_of_extension(m, D, z)
    mdp = weyl_of_extension(m, Dp, z)
    delta = D - Dp
    form1 = mdp @ _inv_checked(delta @ mdp + eye, "(D-D')M_D' + I")
    form2 = _inv_checked(mdp @ delta + eye, "M_D'(D-D') + I") @ mdp
    scale = max(1e-300, float(np.linalg.norm(md)))
    return max(float(np.linalg.norm(md - form1)),
               float(np.linalg.norm(md - form2))) / scale


def max_mult_test(m: HerglotzMatrix, d, x: float,
                  tols: Tolerances = DEFAULT_TOLS) -> MaxMultEvidence:
    """Decide maximum multiplicity at x: T(x) finite and M(x+i0) = D."""
    D = _coerce_d(d)
    rep = boundary_value(m, x, tols)
    if rep.converged:
        residual = float(np.linalg.norm(rep.m_boundary - D))
    else:
        residual = math.inf
    verdict = rep.t_finite and rep.converged and residual <= tols.tol_match
    return MaxMultEvidence(x, rep.t_matrix, rep.m_boundary, residual, verdict)


def _t_via_eps(fn, x: float, tols: Tolerances):
    """∫ dΩ_F(y)/(x-y)² for the measure of the Herglotz function fn.

    Evaluated purely through the limit of Im fn(x+iε)/ε (error O(ε²),
    so second-order Richardson applies).  Returns a matrix, or Divergent
    when the sequence blows up, or None when undecided.
    """
    w = 4.0
    eps = tols.eps0
    samples = []
    prev = prev_r = None
    for _ in range(tols.max_halvings + 1):
        v = np.asarray(fn(x + 1j * eps))
        cur = hermitian_part((v - v.conj().T) / 2j) / eps
        samples.append(cur)
        if prev is not None:
            r = (w * cur - prev) / (w - 1.0)
            if prev_r is not None:
                diff = float(np.linalg.norm(r - prev_r))
                if diff <= tols.tol_bv * max(1.0, float(np.linalg.norm(r))):
                    return hermitian_part(r)
            prev_r = r
        # geometric blow-up over the last few halvings: divergent integral
        if len(samples) >= 4:
            norms = [float(np.linalg.norm(s)) for s in samples[-4:]]
            if norms[-1] > 1e8 and all(norms[i + 1] > 1.8 * norms[i] for i in range(3)):
                diag = np.real(np.diag(samples[-1]))
                dirs = tuple(int(i) for i in np.nonzero(diag > 1e6)[0])
                return Divergent(dirs if dirs else tuple(range(v.shape[0])))
        prev = cur
        eps *= 0.5
    return None


def max_mult_test_via(m: HerglotzMatrix, d, d_prime, x: float,
                      tols: Tolerances = DEFAULT_TOLS,
                      min_gap_sv: float = 1e-8) -> MaxMultEvidence:
    """The same verdict computed through a second extension parameter D'.

    Checks that the divergence integral of the measure of M_{D'} is finite
    and that M_{D'}(x+i0) = (D'-D)^{-1}.  All integrals of that measure are
    taken through ε-limits of M_{D'}; the measure itself is never built.
    """
    D, Dp = _coerce_d(d), _coerce_d(d_prime)
    gap = Dp - D
    s = np.linalg.svd(gap, compute_uv=False)
    if s[-1] <= min_gap_sv:
        raise PreconditionError(
            f"det(D - D') vanishes within tolerance (smallest sv {s[-1]:.3e})")
    target = _inv_checked(gap, "D' - D")

    fn = extension_weyl(m, Dp)
    t_val = _t_via_eps(fn, x, tols)
    if t_val is None:
        return MaxMultEvidence(x, Divergent(()), None, math.inf, False)

    bval, _, ok = richardson_limit(lambda e: fn(x + 1j * e), tols)
    if not ok:
        return MaxMultEvidence(x, t_val, None, math.inf, False)
    bval = hermitian_part(bval)
    # relative match: the target norm grows like the inverse of the D-D' gap
    # and the eps-limit precision scales with it
    residual = float(np.linalg.norm(bval - target)) / max(1.0, float(np.linalg.norm(target)))
    verdict = (not is_divergent(t_val)) and residual <= tols.tol_match
    return MaxMultEvidence(x, t_val, bval, residual, verdict)


def extension_for_point(m: HerglotzMatrix, x: float,
                        tols: Tolerances = DEFAULT_TOLS) -> Optional[ExtensionParameter]:
    """The parameter D := M(x+i0) making x maximal, or None when T(x) diverges."""
    t = t_matrix(m, x)
    if is_divergent(t):
        return None
    rep = boundary_value(m, x, tols)
    if not rep.converged:
        raise InconsistencyError(
            f"T({x}) is finite but the boundary value did not converge")
    return ExtensionParameter(rep.m_boundary)


def mass_at_max_mult(m: HerglotzMatrix, d, x: float,
                     tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Eigenvalue mass T(x)^{-1} at a verified maximum-multiplicity point."""
    ev = max_mult_test(m, d, x, tols)
    if not ev.verdict:
        raise PreconditionError(f"x={x} is not a maximum-multiplicity point for this D")
    return hermitian_part(_inv_checked(np.asarray(ev.t_value), "T(x)"))
