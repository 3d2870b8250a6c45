"""Holomorphic frames, the Macfarlane chart and Pluecker coordinates of G(m, n).

Index tuples for Pluecker coordinates are 1-based and strictly increasing,
``(i1, ..., im)``, stored in lexicographic order.
"""
from __future__ import annotations

import warnings
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadDimension,
    DegenerateAtPoint,
    UnsupportedFrame,
    UnsupportedRank,
)
from .polyhermite import BiPoly, HermitianPoly, HoloPoly, abs2, mul_conj


class DegenerateFrameWarning(UserWarning):
    pass


def _as_holo(e) -> HoloPoly:
    return e if isinstance(e, HoloPoly) else HoloPoly(e)


class GrassmannFrame:
    """An ``n x m`` matrix of holomorphic polynomials whose columns span the map.

    ``entries[i][a]`` is component ``i`` of column ``a`` (both 0-based).
    Linear independence of the columns is not enforced on construction; see
    :meth:`is_independent`.
    """

    __slots__ = ("entries", "n", "m")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(_as_holo(e) for e in row) for row in entries)
        n = len(rows)
        m = len(rows[0]) if n else 0
        if m < 1 or any(len(row) != m for row in rows):
            raise BadDimension("frame rows must all have the same positive length")
        if m >= n:
            raise BadDimension(f"need m < n, got m={m}, n={n}")
        self.entries = rows
        self.n = n
        self.m = m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "GrassmannFrame":
        cols = [list(c) for c in columns]
        n = len(cols[0])
        return cls([[cols[a][i] for a in range(len(cols))] for i in range(n)])

    @property
    def columns(self) -> list[list[HoloPoly]]:
        return [[row[a] for row in self.entries] for a in range(self.m)]

    def __call__(self, x: complex) -> np.ndarray:
        return np.array([[e(x) for e in row] for row in self.entries], dtype=complex)

    def right_multiply(self, g) -> "GrassmannFrame":
        """Frame times a constant ``m x m`` matrix (a gauge transformation)."""
        g = np.asarray(g, dtype=complex)
        rows = []
        for row in self.entries:
            rows.append([sum((row[a] * g[a, b] for a in range(self.m)), HoloPoly.zero())
                         for b in range(self.m)])
        return GrassmannFrame(rows)

    def max_degree(self) -> int:
        return max(e.degree for row in self.entries for e in row)

    def is_independent(self, seed: int = 0, tol: float = 1e-10) -> bool:
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)
        for x in pts:
            f = self(x)
            if np.linalg.det(f.conj().T @ f).real <= tol:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, GrassmannFrame):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        return f"GrassmannFrame(n={self.n}, m={self.m})"


class MacfarlaneMap:
    """The chart ``Z = (I_m; K)`` with ``K`` an ``(n-m) x m`` holomorphic matrix."""

    __slots__ = ("K", "n", "m")

    def __init__(self, K: Sequence[Sequence], n: int | None = None, m: int | None = None):
        rows = tuple(tuple(_as_holo(e) for e in row) for row in K)
        if m is None:
            m = len(rows[0]) if rows else None
        if m is None or m < 1:
            raise BadDimension("cannot infer m from an empty K")
        if n is None:
            n = m + len(rows)
        if len(rows) != n - m or any(len(row) != m for row in rows) or n <= m:
            raise BadDimension(f"K must be {(n - m)}x{m} for G({m},{n})")
        self.K = rows
        self.n = n
        self.m = m

    def to_frame(self) -> GrassmannFrame:
        m = self.m
        top = [[HoloPoly([1.0 if a == b else 0.0]) for b in range(m)] for a in range(m)]
        return GrassmannFrame(top + [list(row) for row in self.K])

    def __call__(self, x: complex) -> np.ndarray:
        return np.array([[e(x) for e in row] for row in self.K], dtype=complex).reshape(self.n - self.m, self.m)

    def __eq__(self, other):
        if not isinstance(other, MacfarlaneMap):
            return NotImplemented
        return (self.n, self.m, self.K) == (other.n, other.m, other.K)

    def __repr__(self):
        return f"MacfarlaneMap(n={self.n}, m={self.m})"


def display_order(n: int) -> list[tuple[int, int]]:
    """Display order for G(2, n) Pluecker vectors: p12, (p2i, p1i) for i >= 3, then p_ij with 3 <= i < j."""
    out = [(1, 2)]
    for i in range(3, n + 1):
        out += [(2, i), (1, i)]
    out += [(i, j) for i in range(3, n + 1) for j in range(i + 1, n + 1)]
    return out


class PlueckerVector:
    """The ``C(n, m)`` maximal minors of a frame keyed by increasing 1-based index tuples."""

    __slots__ = ("n", "m", "entries")

    def __init__(self, n: int, m: int, entries: dict):
        if not 1 <= m < n:
            raise BadDimension(f"need 1 <= m < n, got m={m}, n={n}")
        keys = list(combinations(range(1, n + 1), m))
        missing = set(entries) - set(keys)
        if missing:
            raise BadDimension(f"invalid Pluecker indices {sorted(missing)}")
        self.n = n
        self.m = m
        self.entries = {k: _as_holo(entries.get(k, HoloPoly.zero())) for k in keys}

    @classmethod
    def from_display_order(cls, n: int, values: Sequence) -> "PlueckerVector":
        order = display_order(n)
        if len(values) != len(order):
            raise BadDimension(f"expected {len(order)} entries for G(2,{n})")
        return cls(n, 2, dict(zip(order, values)))

    def __getitem__(self, idx) -> HoloPoly:
        return self.entries[tuple(idx)]

    def __len__(self):
        return len(self.entries)

    @property
    def indices(self) -> list[tuple]:
        return list(self.entries)

    def values(self) -> list[HoloPoly]:
        return list(self.entries.values())

    def gram_det(self) -> HermitianPoly:
        out = HermitianPoly(np.zeros((1, 1)))
        for p in self.entries.values():
            out = out + abs2(p)
        return out

    def to_macfarlane(self, tol: float = 1e-12) -> MacfarlaneMap:
        """Recover ``K`` from ``p12 == 1``: ``K[i, 0] = -p(2, i+3)``, ``K[i, 1] = p(1, i+3)``."""
        if self.m != 2:
            raise UnsupportedRank("Macfarlane recovery is implemented for m = 2 only")
        if not self[(1, 2)].allclose(HoloPoly([1.0]), atol=tol):
            raise UnsupportedFrame("p12 must be identically 1")
        K = [[-self[(2, i)], self[(1, i)]] for i in range(3, self.n + 1)]
        return MacfarlaneMap(K, self.n, 2)

    def __repr__(self):
        return f"PlueckerVector(n={self.n}, m={self.m})"


def pluecker_minors(frame: GrassmannFrame) -> PlueckerVector:
    """All ``m x m`` minors of the frame, rows taken in increasing order.

    Minors of the leading ``k`` columns are built from those of the leading
    ``k - 1`` columns by Laplace expansion along column ``k``.
    """
    n, m = frame.n, frame.m
    E = frame.entries
    prev = {(i,): E[i][0] for i in range(n)}
    for k in range(1, m):
        cur = {}
        for S in combinations(range(n), k + 1):
            acc = HoloPoly.zero()
            for t, i in enumerate(S):
                term = E[i][k] * prev[S[:t] + S[t + 1:]]
                acc = acc + term if (t + k) % 2 == 0 else acc - term
            cur[S] = acc
        prev = cur
    return PlueckerVector(n, m, {tuple(i + 1 for i in S): v for S, v in prev.items()})


def gram_det(frame: GrassmannFrame) -> HermitianPoly:
    """``det(F^dagger F)`` as the sum of squared moduli of the Pluecker minors."""
    out = pluecker_minors(frame).gram_det()
    if out.is_zero():
        warnings.warn("frame columns are linearly dependent: Gram determinant is zero",
                      DegenerateFrameWarning, stacklevel=2)
    return out


def gram_matrix(frame: GrassmannFrame) -> list[list[BiPoly]]:
    """Entries ``(a, b) = sum_i conj(f_a[i]) f_b[i]`` of ``F^dagger F``."""
    cols = frame.columns
    m = frame.m
    out = []
    for a in range(m):
        row = []
        for b in range(m):
            acc = BiPoly([[0.0]])
            for i in range(frame.n):
                acc = acc + mul_conj(cols[b][i], cols[a][i])
            row.append(acc)
        out.append(row)
    return out


def bipoly_det(matrix: Sequence[Sequence[BiPoly]]) -> BiPoly:
    """Determinant of a square matrix of ``BiPoly`` by cofactor expansion along rows."""
    size = len(matrix)

    @lru_cache(maxsize=None)
    def minor(row: int, cols: tuple) -> BiPoly:
        if row == size:
            return BiPoly([[1.0]])
        acc = BiPoly([[0.0]])
        for t, c in enumerate(cols):
            sub = minor(row + 1, cols[:t] + cols[t + 1:])
            term = matrix[row][c] * sub
            acc = acc + term if t % 2 == 0 else acc - term
        return acc

    return minor(0, tuple(range(size)))


def macfarlane_gram_det(mmap: MacfarlaneMap) -> HermitianPoly:
    """``det(I_m + K^dagger K)`` as the Gram determinant of the stacked frame ``(I_m; K)``.

    Summing squared minors has no cancellation, unlike cofactor expansion of
    the ``m x m`` matrix (see :func:`macfarlane_gram_det_cofactor`), which
    loses digits once ``m >= 4``.
    """
    return pluecker_minors(mmap.to_frame()).gram_det()


def macfarlane_gram_det_cofactor(mmap: MacfarlaneMap) -> HermitianPoly:
    """``det(I_m + K^dagger K)`` by direct cofactor expansion of the ``m x m`` matrix."""
    m = mmap.m
    M = []
    for a in range(m):
        row = []
        for b in range(m):
            acc = BiPoly([[1.0 if a == b else 0.0]])
            for i in range(mmap.n - m):
                acc = acc + mul_conj(mmap.K[i][b], mmap.K[i][a])
            row.append(acc)
        M.append(row)
    return HermitianPoly(bipoly_det(M).coeffs)


def duality_transpose(mmap: MacfarlaneMap) -> MacfarlaneMap:
    """The map of G(n-m, n) with ``K' = K^T``."""
    m, r = mmap.m, mmap.n - mmap.m
    Kt = [[mmap.K[i][a] for i in range(r)] for a in range(m)]
    return MacfarlaneMap(Kt, mmap.n, r)


def _holo_det(A: list[list[HoloPoly]]) -> HoloPoly:
    size = len(A)
    if size == 1:
        return A[0][0]
    acc = HoloPoly.zero()
    for c in range(size):
        sub = [row[:c] + row[c + 1:] for row in A[1:]]
        term = A[0][c] * _holo_det(sub)
        acc = acc + term if c % 2 == 0 else acc - term
    return acc


def frame_to_macfarlane(frame: GrassmannFrame, tol: float = 1e-12) -> MacfarlaneMap:
    """Normalise a frame to ``(I; K)`` by a holomorphic gauge transformation.

    Only frames whose top ``m x m`` block has a nonzero constant determinant
    are accepted, since otherwise ``K`` would be rational.
    """
    m = frame.m
    A = [list(row) for row in frame.entries[:m]]
    B = [list(row) for row in frame.entries[m:]]
    d = _holo_det(A)
    if d.degree != 0 or abs(d.coeffs[0]) <= tol:
        raise UnsupportedFrame("top m x m block is not invertible over polynomials")
    inv = 1.0 / d.coeffs[0]
    adj = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            sub = [row[:j] + row[j + 1:] for k, row in enumerate(A) if k != i]
            cof = _holo_det(sub) if sub else HoloPoly([1.0])
            adj[j][i] = cof * ((-1) ** (i + j) * inv)
    K = [[sum((row[c] * adj[c][b] for c in range(m)), HoloPoly.zero()) for b in range(m)] for row in B]
    return MacfarlaneMap(K, frame.n, m)


def duality_transpose_frame(frame: GrassmannFrame) -> MacfarlaneMap:
    return duality_transpose(frame_to_macfarlane(frame))


def embed_pad(obj):
    """Append a zero component, carrying a map of G(m, n) into G(m, n + 1).

    Accepts a :class:`GrassmannFrame`, :class:`MacfarlaneMap` or
    :class:`PlueckerVector` and returns the same kind.
    """
    if isinstance(obj, GrassmannFrame):
        return GrassmannFrame(list(obj.entries) + [[HoloPoly.zero()] * obj.m])
    if isinstance(obj, MacfarlaneMap):
        return MacfarlaneMap(list(obj.K) + [[HoloPoly.zero()] * obj.m], obj.n + 1, obj.m)
    if isinstance(obj, PlueckerVector):
        return PlueckerVector(obj.n + 1, obj.m, dict(obj.entries))
    raise TypeError(f"cannot embed {type(obj).__name__}")


def pluecker_relations_check(pv: PlueckerVector, tol: float = 1e-10) -> bool:
    """Three-term relations ``p_ij p_kl - p_ik p_jl + p_il p_jk = 0`` for m = 2.

    With ``p12 = 1`` the quadruples ``(1, 2, i, j)`` give
    ``p_ij = p_1i p_2j - p_1j p_2i``.
    """
    if pv.m != 2:
        raise UnsupportedRank("Pluecker relations are checked for m = 2 only")
    scale = max(float(np.abs(p.coeffs).max()) for p in pv.values()) or 1.0
    for i, j, k, q in combinations(range(1, pv.n + 1), 4):
        rel = pv[(i, j)] * pv[(k, q)] - pv[(i, k)] * pv[(j, q)] + pv[(i, q)] * pv[(j, k)]
        if np.abs(rel.coeffs).max() > tol * scale * scale:
            return False
    return True


def gram_schmidt(vectors: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalise the columns of ``vectors`` (modified Gram-Schmidt).

    Returns the orthonormal columns and the norms of the orthogonalised
    vectors before normalisation.
    """
    v = np.array(vectors, dtype=complex)
    n, m = v.shape
    norms = np.empty(m)
    for a in range(m):
        ref = np.linalg.norm(vectors[:, a])
        for b in range(a):
            v[:, a] -= np.vdot(v[:, b], v[:, a]) * v[:, b]
        nrm = np.linalg.norm(v[:, a])
        if nrm <= tol * max(ref, 1e-300):
            raise DegenerateAtPoint(f"column {a} is dependent on the previous ones")
        norms[a] = nrm
        v[:, a] /= nrm
    return v, norms


def gram_schmidt_check(frame: GrassmannFrame, points: Iterable[complex]) -> float:
    """Max relative gap between ``prod |f~_i|^2`` from numeric Gram-Schmidt and ``gram_det``."""
    det = gram_det(frame)
    worst = 0.0
    for x in points:
        _, norms = gram_schmidt(frame(x))
        numeric = float(np.prod(norms ** 2))
        exact = det(x)
        worst = max(worst, abs(numeric - exact) / abs(exact))
    return worst
