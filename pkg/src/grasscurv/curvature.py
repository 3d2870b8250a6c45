"""Energy density, Gaussian curvature and the Euler-Lagrange check for holomorphic maps.

For a holomorphic frame with Gram determinant ``h`` the energy density is
``L = 1/2 d dbar ln h`` and the curvature of the induced metric is
``K = -(1/L) d dbar ln L``.  Constant curvature ``4/r`` holds exactly when
``h`` is a multiple of ``(1 + |x|^2)**r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetric, PoleAtPoint, ZeroPolynomial
from .grassmann import GrassmannFrame, gram_schmidt
from .polyhermite import (
    STRUCT_TOL,
    HermitianPoly,
    HermitianRational,
    binomial_match,
    rational_log_laplacian,
)


@dataclass
class CurvatureReport:
    constant: bool
    r: int | None
    kappa: float | None
    scan: list[tuple[complex, float, float]] = field(default_factory=list)
    tol: float = STRUCT_TOL

    def __post_init__(self):
        if self.constant and (self.r is None or self.r < 1 or self.kappa != 4 / self.r):
            raise ValueError("a constant report needs r >= 1 and kappa == 4/r")

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "r": self.r,
            "kappa": self.kappa,
            "tol": self.tol,
            "scan": [{"x_re": x.real, "x_im": x.imag, "L": L, "K": K} for x, L, K in self.scan],
        }


@dataclass
class SigmaFieldPoint:
    """Normalised field ``Z`` at a point with its gauge field and covariant derivatives."""

    x: complex
    Z: np.ndarray
    A: np.ndarray
    DZ: np.ndarray
    DbarZ: np.ndarray


def energy_density(detM: HermitianPoly) -> HermitianRational:
    """``1/2 d dbar ln detM`` as an exact rational function."""
    return rational_log_laplacian(detM) * 0.5


class CurvatureField:
    """Pointwise evaluator of ``K = -(1/L) d dbar ln L`` for a rational energy density.

    With ``L = N / D``, ``d dbar ln L = d dbar ln N - d dbar ln D`` and both
    terms are exact rationals, so no polynomial of degree beyond ``4 deg N``
    is ever formed.
    """

    def __init__(self, L: HermitianRational, tol: float = 1e-12):
        if L.num.is_zero():
            raise DegenerateMetric("energy density vanishes identically")
        self.L = L
        self.tol = tol
        self._lnum = rational_log_laplacian(L.num)
        self._lden = rational_log_laplacian(L.den)

    def __call__(self, x: complex) -> float:
        Lx = self.L(x)
        if Lx <= self.tol:
            raise DegenerateMetric(f"energy density {Lx:g} <= {self.tol:g} at {x}")
        return -(self._lnum(x) - self._lden(x)) / Lx


def gauss_curvature(L: HermitianRational, x: complex, tol: float = 1e-12) -> float:
    return CurvatureField(L, tol)(x)


def default_grid(a: float = -2.0, b: float = 2.0, steps: int = 5) -> list[complex]:
    xs = np.linspace(a, b, steps)
    return [complex(u, v) for v in xs for u in xs]


def curvature_scan(detM: HermitianPoly, points=None, tol: float = 1e-12) -> list[tuple[complex, float, float]]:
    """``(x, L(x), K(x))`` at each point where the metric is nondegenerate."""
    L = energy_density(detM)
    if points is None:
        points = default_grid()
    try:
        field_ = CurvatureField(L, tol)
    except DegenerateMetric:
        return []
    out = []
    for x in points:
        try:
            out.append((complex(x), L(x), field_(x)))
        except (DegenerateMetric, PoleAtPoint):
            continue
    return out


def constant_curvature_check(detM: HermitianPoly, tol: float = STRUCT_TOL, seed: int = 0,
                             n_points: int = 5) -> CurvatureReport:
    """Certify ``detM = c (1 + |x|^2)**r`` and confirm ``K = 4/r`` at random points."""
    if detM.is_zero():
        raise ZeroPolynomial("Gram determinant is identically zero")
    match = binomial_match(detM, tol)
    if match is not None and match.r >= 1:
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-2, 2, n_points) + 1j * rng.uniform(-2, 2, n_points)
        scan = curvature_scan(detM, pts)
        kappa = 4 / match.r
        if len(scan) == n_points and all(abs(K - kappa) <= tol for _, _, K in scan):
            return CurvatureReport(True, match.r, kappa, scan, tol)
    return CurvatureReport(False, None, None, curvature_scan(detM), tol)


def _normalised(frame: GrassmannFrame, x: complex) -> np.ndarray:
    Z, _ = gram_schmidt(frame(x))
    return Z


def sigma_field_point(frame: GrassmannFrame, x: complex, h: float = 1e-4) -> tuple[SigmaFieldPoint, np.ndarray]:
    """Field data at ``x`` from a five-point stencil; also returns ``d dbar Z``."""
    Z0 = _normalised(frame, x)
    Zxp, Zxm = _normalised(frame, x + h), _normalised(frame, x - h)
    Zyp, Zym = _normalised(frame, x + 1j * h), _normalised(frame, x - 1j * h)
    Zx = (Zxp - Zxm) / (2 * h)
    Zy = (Zyp - Zym) / (2 * h)
    dZ = 0.5 * (Zx - 1j * Zy)
    dbZ = 0.5 * (Zx + 1j * Zy)
    ddbZ = 0.25 * (Zxp + Zxm + Zyp + Zym - 4 * Z0) / h ** 2
    H = Z0.conj().T
    A = -1j * (H @ dZ)
    DZ = dZ - Z0 @ (H @ dZ)
    DbarZ = dbZ - Z0 @ (H @ dbZ)
    return SigmaFieldPoint(complex(x), Z0, A, DZ, DbarZ), (dZ, dbZ, ddbZ)


def euler_lagrange_residual(frame: GrassmannFrame, x: complex, h: float = 1e-4) -> float:
    """Max-entry norm of ``Dbar D Z + Z (DZ)^dagger DZ`` from central differences.

    ``Z`` is the Gram-Schmidt normalisation of the frame at each stencil
    point.  Holomorphic frames solve the equation, so the result is the
    ``O(h**2)`` truncation error (plus rounding of order ``eps / h**2``).
    """
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-6, 1e-3]")
    pt, (dZ, dbZ, ddbZ) = sigma_field_point(frame, x, h)
    Z, DZ = pt.Z, pt.DZ
    H = Z.conj().T
    dbar_DZ = ddbZ - (dbZ @ (H @ dZ) + Z @ (dZ.conj().T @ dZ) + Z @ (H @ ddbZ))
    E = dbar_DZ - DZ @ (H @ dbZ) + Z @ (DZ.conj().T @ DZ)
    return float(np.abs(E).max())
