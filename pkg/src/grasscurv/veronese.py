"""Veronese curves in CP^(n-1) and G(m, n), and the P+ orbit of a holomorphic curve."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, sqrt

import numpy as np
from scipy.signal import convolve2d

from .errors import BadDimension, DegenerateAtPoint
from .grassmann import GrassmannFrame, MacfarlaneMap
from .polyhermite import HoloPoly


@dataclass(frozen=True)
class VeroneseSpec:
    n: int
    m: int = 1

    def __post_init__(self):
        if self.n < 2 or not 1 <= self.m < self.n:
            raise BadDimension(f"need n >= 2 and 1 <= m < n, got m={self.m}, n={self.n}")

    @property
    def r_max(self) -> int:
        """Exponent of ``(1 + |x|^2)`` in the Gram determinant: ``m (n - m)``."""
        return self.m * (self.n - self.m)


def veronese_cp(n: int) -> GrassmannFrame:
    """Single-column frame with components ``sqrt(C(n-1, r)) x**r``."""
    if n < 2:
        raise BadDimension(f"need n >= 2, got {n}")
    return GrassmannFrame([[HoloPoly.monomial(sqrt(comb(n - 1, r)), r)] for r in range(n)])


def veronese_frame(spec: VeroneseSpec) -> GrassmannFrame:
    """Columns ``f, f', ..., f^(m-1)`` of the CP^(n-1) Veronese curve ``f``."""
    f = [row[0] for row in veronese_cp(spec.n).entries]
    cols = [f]
    for _ in range(1, spec.m):
        cols.append([e.derivative() for e in cols[-1]])
    return GrassmannFrame.from_columns(cols)


def veronese_macfarlane(spec: VeroneseSpec) -> MacfarlaneMap:
    """Closed-form ``K`` of the Veronese curve in the Macfarlane chart."""
    n, m = spec.n, spec.m
    K = []
    for i in range(1, n - m + 1):
        row = []
        for j in range(1, m + 1):
            coef = ((-1) ** (m - j) * (m - j + 1) / (m - j + i)
                    * sqrt(comb(n - 1, i + m - 1)) / sqrt(comb(n - 1, j - 1))
                    * comb(i + m - 1, m) * comb(m, j - 1))
            row.append(HoloPoly.monomial(coef, i - j + m))
        K.append(row)
    return MacfarlaneMap(K, n, m)


# Jets: arrays J[a, b] holding the coefficient of d**a * conj(d)**b in the
# expansion about the base point, truncated at total degree `order`.

def _truncate(J: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros(J.shape[:-2] + (order + 1, order + 1), dtype=complex)
    a = min(J.shape[-2], order + 1)
    b = min(J.shape[-1], order + 1)
    out[..., :a, :b] = J[..., :a, :b]
    mask = np.add.outer(np.arange(order + 1), np.arange(order + 1)) > order
    out[..., mask] = 0
    return out


def _jmul(A: np.ndarray, B: np.ndarray, order: int) -> np.ndarray:
    return _truncate(convolve2d(A, B), order)


def _jconj(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A.conj(), -1, -2)


def _jd(A: np.ndarray, order: int) -> np.ndarray:
    out = A[..., 1:, :] * np.arange(1, A.shape[-2])[:, None]
    return _truncate(out, order - 1)


def _jinv(A: np.ndarray, order: int) -> np.ndarray:
    a0 = A[0, 0]
    u = A / a0
    u[0, 0] = 0
    out = np.zeros_like(A)
    out[0, 0] = 1
    term = out.copy()
    for _ in range(order):
        term = -_jmul(term, u, order)
        out = out + term
    return out / a0


def _pplus_jet(g: np.ndarray, order: int) -> np.ndarray:
    dg = _jd(g, order)
    g = _truncate(g, order - 1)
    inner = sum(_jmul(_jconj(g[i]), dg[i], order - 1) for i in range(g.shape[0]))
    norm = sum(_jmul(_jconj(g[i]), g[i], order - 1) for i in range(g.shape[0]))
    coef = _jmul(inner, _jinv(norm, order - 1), order - 1)
    return np.array([dg[i] - _jmul(coef, g[i], order - 1) for i in range(g.shape[0])])


def pplus_orbit(f: GrassmannFrame, k: int, x: complex, tol: float = 1e-12) -> list[np.ndarray]:
    """Values at ``x`` of ``f, P+ f, ..., P+^k f`` for a holomorphic curve ``f``.

    ``P+ g = dg - (g^dagger dg / |g|^2) g`` involves non-holomorphic
    functions, so each application is carried out on jets in ``(d, conj(d))``
    around ``x``; a jet of order ``k`` suffices for ``k`` applications.
    """
    if f.m != 1:
        raise BadDimension("P+ orbit needs a single-column frame")
    if not 0 <= k <= f.n - 1:
        raise BadDimension(f"need 0 <= k <= n - 1, got k={k}")
    g = np.zeros((f.n, k + 1, k + 1), dtype=complex)
    for i, row in enumerate(f.entries):
        p = row[0]
        fact = 1.0
        for a in range(k + 1):
            g[i, a, 0] = p(x) / fact
            p = p.derivative()
            fact *= a + 1
    out = [g[:, 0, 0].copy()]
    if np.linalg.norm(out[0]) <= tol:
        raise DegenerateAtPoint(f"f vanishes at {x}")
    for step in range(k):
        order = k - step
        ref = np.linalg.norm(_jd(g, order)[:, 0, 0])
        g = _pplus_jet(g, order)
        v = g[:, 0, 0].copy()
        if np.linalg.norm(v) <= tol * max(ref, 1.0):
            raise DegenerateAtPoint(f"P+^{step + 1} f vanishes at {x}")
        out.append(v)
    return out
