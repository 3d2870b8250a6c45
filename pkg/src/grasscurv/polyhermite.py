"""Polynomials in a complex variable ``z`` and its conjugate ``zbar``.

Three value types live here:

``HoloPoly``
    a polynomial in ``z`` alone (an entry of a holomorphic frame);
``BiPoly`` / ``HermitianPoly``
    polynomials in ``z`` and ``zbar``; the Hermitian subclass is real valued
    on the complex plane and carries Gram determinants such as
    ``det(Z^dagger Z)``;
``HermitianRational``
    a quotient of two Hermitian polynomials (energy densities and log
    Laplacians are rational).

Coefficients are stored densely: ``coeffs[j, k]`` multiplies
``z**j * zbar**k``.  Degrees are capped at :data:`DEGREE_CAP` per variable.
"""
from __future__ import annotations

from math import comb
from typing import NamedTuple, Union

import numpy as np
from scipy.signal import convolve2d

from .errors import DegreeOverflow, NotHermitian, PoleAtPoint, ZeroPolynomial

DEGREE_CAP = 64
STRUCT_TOL = 1e-9

Number = Union[int, float, complex]


def _check_degree(*degrees: int) -> None:
    if max(degrees) > DEGREE_CAP:
        raise DegreeOverflow(f"degree {max(degrees)} exceeds cap {DEGREE_CAP}")


def _powers(x, d: int) -> np.ndarray:
    out = np.empty(d + 1, dtype=complex if isinstance(x, complex) else float)
    out[0] = 1.0
    for i in range(1, d + 1):
        out[i] = out[i - 1] * x
    return out


class HoloPoly:
    """Polynomial in ``z`` with complex coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        _check_degree(c.size - 1)
        c = c.copy()
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def monomial(cls, coef: Number, power: int) -> "HoloPoly":
        c = np.zeros(power + 1, dtype=complex)
        c[power] = coef
        return cls(c)

    @classmethod
    def zero(cls) -> "HoloPoly":
        return cls([0.0])

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return -1 if self.is_zero() else self.coeffs.size - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, x: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1], x))

    def derivative(self) -> "HoloPoly":
        c = self.coeffs
        if c.size == 1:
            return HoloPoly.zero()
        return HoloPoly(c[1:] * np.arange(1, c.size))

    def __add__(self, other):
        if not isinstance(other, HoloPoly):
            other = HoloPoly([other])
        a, b = self.coeffs, other.coeffs
        out = np.zeros(max(a.size, b.size), dtype=complex)
        out[: a.size] += a
        out[: b.size] += b
        return HoloPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return HoloPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HoloPoly):
            if self.is_zero() or other.is_zero():
                return HoloPoly.zero()
            _check_degree(self.degree + other.degree)
            return HoloPoly(np.convolve(self.coeffs, other.coeffs))
        return HoloPoly(self.coeffs * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, HoloPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def allclose(self, other: "HoloPoly", atol: float = 1e-12) -> bool:
        d = (self - other).coeffs
        return bool(np.all(np.abs(d) <= atol))

    def __repr__(self):
        return f"HoloPoly({self.coeffs.tolist()!r})"


class BiPoly:
    """Polynomial in ``z`` and ``zbar``; ``coeffs[j, k]`` multiplies ``z**j zbar**k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 2:
            raise ValueError("coefficient array must be two dimensional")
        if c.size == 0:
            c = np.zeros((1, 1), dtype=complex)
        rows = np.flatnonzero(np.any(c != 0, axis=1))
        cols = np.flatnonzero(np.any(c != 0, axis=0))
        if rows.size == 0:
            c = np.zeros((1, 1), dtype=complex)
        else:
            c = c[: rows[-1] + 1, : cols[-1] + 1]
        _check_degree(*(s - 1 for s in c.shape))
        c = c.copy()
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def from_terms(cls, terms: dict) -> "BiPoly":
        """Build from a sparse ``{(j, k): coefficient}`` mapping."""
        if not terms:
            return cls(np.zeros((1, 1)))
        dz = max(j for j, _ in terms)
        dzb = max(k for _, k in terms)
        _check_degree(dz, dzb)
        c = np.zeros((dz + 1, dzb + 1), dtype=complex)
        for (j, k), v in terms.items():
            c[j, k] += v
        return cls(c)

    def terms(self, tol: float = 0.0) -> dict:
        """Sparse view ``{(j, k): coefficient}`` of the entries larger than ``tol``."""
        js, ks = np.nonzero(np.abs(self.coeffs) > tol)
        return {(int(j), int(k)): complex(self.coeffs[j, k]) for j, k in zip(js, ks)}

    def coeff(self, j: int, k: int) -> complex:
        c = self.coeffs
        if j < c.shape[0] and k < c.shape[1]:
            return complex(c[j, k])
        return 0j

    @property
    def degree(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def is_hermitian(self, tol: float = STRUCT_TOL) -> bool:
        c = self.coeffs
        d = max(c.shape)
        sq = np.zeros((d, d), dtype=complex)
        sq[: c.shape[0], : c.shape[1]] = c
        scale = max(np.abs(sq).max(), 1e-300)
        return bool(np.abs(sq - sq.conj().T).max() <= tol * scale)

    def hermitian(self) -> "HermitianPoly":
        return HermitianPoly(self.coeffs)

    def conj(self) -> "BiPoly":
        """The polynomial whose value at ``x`` is the conjugate of this one's."""
        return self._wrap(self.coeffs.conj().T, self)

    def scale(self, x: complex) -> float:
        """Sum of the moduli of all terms at ``x``; the size of a cancellation-free evaluation."""
        c = self.coeffs
        a = _powers(float(abs(x)), sum(c.shape))
        j = np.arange(c.shape[0])[:, None]
        k = np.arange(c.shape[1])[None, :]
        return float(np.sum(np.abs(c) * a[j + k]))

    def __call__(self, x: complex) -> complex:
        c = self.coeffs
        x = complex(x)
        return complex(_powers(x, c.shape[0] - 1) @ c @ _powers(x.conjugate(), c.shape[1] - 1))

    @staticmethod
    def _wrap(c, *operands):
        if all(isinstance(o, HermitianPoly) for o in operands):
            return HermitianPoly(c, _trusted=True)
        return BiPoly(c)

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, (int, float)) or (isinstance(other, complex) and other.imag == 0):
            return HermitianPoly(np.array([[other]], dtype=complex), _trusted=True)
        return BiPoly(np.array([[other]], dtype=complex))

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])), dtype=complex)
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return self._wrap(out, self, other)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.coeffs, self)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        _check_degree(a.shape[0] + b.shape[0] - 2, a.shape[1] + b.shape[1] - 2)
        if a.size == 1 or b.size == 1:
            out = a * b
        else:
            out = convolve2d(a, b)
        return self._wrap(out, self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self._coerce(1.0) if isinstance(self, HermitianPoly) else BiPoly([[1.0]])
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def allclose(self, other: "BiPoly", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        d = (self - other).coeffs
        scale = max(np.abs(self.coeffs).max(), np.abs(other.coeffs).max())
        return bool(np.abs(d).max() <= atol + rtol * scale)

    def __repr__(self):
        return f"{type(self).__name__}({self.terms()!r})"


class HermitianPoly(BiPoly):
    """A ``BiPoly`` with ``coeff(k, j) == conj(coeff(j, k))``; real valued on the plane.

    The constructor checks the symmetry to :data:`STRUCT_TOL` (relative) and
    then symmetrises exactly, so evaluation is real up to rounding.
    """

    __slots__ = ()

    def __init__(self, coeffs, _trusted: bool = False):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 2:
            raise ValueError("coefficient array must be two dimensional")
        d = max(c.shape) if c.size else 1
        sq = np.zeros((d, d), dtype=complex)
        sq[: c.shape[0], : c.shape[1]] = c
        if not _trusted:
            scale = max(np.abs(sq).max(), 1e-300)
            if np.abs(sq - sq.conj().T).max() > STRUCT_TOL * scale:
                raise NotHermitian("coefficients are not Hermitian symmetric")
        super().__init__(0.5 * (sq + sq.conj().T))

    @classmethod
    def radial(cls, coeffs) -> "HermitianPoly":
        """``sum_k coeffs[k] * |z|**(2k)`` for real ``coeffs``."""
        coeffs = np.asarray(coeffs, dtype=float)
        return cls(np.diag(coeffs.astype(complex)))

    @classmethod
    def one_plus_abs2_pow(cls, r: int) -> "HermitianPoly":
        """``(1 + |z|^2)**r``."""
        return cls.radial([comb(r, k) for k in range(r + 1)])

    def eval_real(self, x: complex) -> float:
        v = BiPoly.__call__(self, x)
        if abs(v.imag) > STRUCT_TOL * (1.0 + abs(v.real)) + 1e-13 * self.scale(x):
            raise NotHermitian(f"imaginary residue {v.imag:g} at {x}")
        return v.real

    __call__ = eval_real

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.coeffs)).copy()


class HermitianRational:
    """``num / den`` with Hermitian numerator and denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: HermitianPoly, den: HermitianPoly):
        if not isinstance(num, HermitianPoly):
            num = HermitianPoly(num.coeffs)
        if not isinstance(den, HermitianPoly):
            den = HermitianPoly(den.coeffs)
        if den.is_zero():
            raise ZeroPolynomial("denominator is identically zero")
        self.num = num
        self.den = den

    def __mul__(self, s: float) -> "HermitianRational":
        return HermitianRational(self.num * float(s), self.den)

    __rmul__ = __mul__

    def __call__(self, x: complex) -> float:
        d = BiPoly.__call__(self.den, x)
        if abs(d) < 1e-14 * self.den.scale(x):
            raise PoleAtPoint(f"denominator vanishes at {x}")
        return self.num.eval_real(x) / self.den.eval_real(x)

    def __repr__(self):
        return f"HermitianRational({self.num!r}, {self.den!r})"


def mul_conj(p: HoloPoly, q: HoloPoly) -> BiPoly:
    """``p(z) * conj(q(z))`` as a polynomial in ``z`` and ``zbar``.

    Hermitian (and returned as :class:`HermitianPoly`) when ``p == q``.
    """
    c = np.outer(p.coeffs, np.conj(q.coeffs))
    if p is q or p == q:
        return HermitianPoly(c, _trusted=True)
    return BiPoly(c)


def abs2(p: HoloPoly) -> HermitianPoly:
    return mul_conj(p, p)


def partial_z(h: BiPoly) -> BiPoly:
    """Formal derivative in ``z``: ``z**j zbar**k -> j z**(j-1) zbar**k``."""
    c = h.coeffs
    if c.shape[0] == 1:
        return BiPoly(np.zeros((1, 1)))
    return BiPoly(c[1:, :] * np.arange(1, c.shape[0])[:, None])


def partial_zbar(h: BiPoly) -> BiPoly:
    """Formal derivative in ``zbar``."""
    c = h.coeffs
    if c.shape[1] == 1:
        return BiPoly(np.zeros((1, 1)))
    return BiPoly(c[:, 1:] * np.arange(1, c.shape[1])[None, :])


def laplacian(h: BiPoly) -> BiPoly:
    """``d dbar h``; Hermitian input gives Hermitian output."""
    out = partial_zbar(partial_z(h))
    return HermitianPoly(out.coeffs, _trusted=True) if isinstance(h, HermitianPoly) else out


def rational_log_laplacian(h: HermitianPoly) -> HermitianRational:
    """``d dbar ln h = (h d dbar h - d h dbar h) / h**2`` exactly."""
    if h.is_zero():
        raise ZeroPolynomial("cannot take the logarithm of the zero polynomial")
    dh = partial_z(h)
    num = h * laplacian(h) - dh * dh.conj()
    return HermitianRational(HermitianPoly(num.coeffs, _trusted=True), h * h)


def evaluate(obj, x: complex) -> float:
    """Real value of a Hermitian polynomial or rational at ``x``."""
    if isinstance(obj, (HermitianPoly, HermitianRational)):
        return obj(x)
    if isinstance(obj, BiPoly):
        return HermitianPoly(obj.coeffs).eval_real(x)
    raise TypeError(f"cannot evaluate {type(obj).__name__}")


class BinomialMatch(NamedTuple):
    r: int
    c: float


def binomial_match(h: BiPoly, tol: float = STRUCT_TOL) -> BinomialMatch | None:
    """Test whether ``h == c * (1 + |z|^2)**r``.

    ``c`` is read off the constant term and ``r`` off the highest diagonal
    term; all other coefficients must then agree to ``tol * c``.  Returns
    ``None`` when they do not.
    """
    coeffs = h.coeffs
    c = coeffs[0, 0].real
    if not c > 0 or abs(coeffs[0, 0].imag) > tol * c:
        return None
    diag = np.diag(coeffs)
    big = np.flatnonzero(np.abs(diag) > tol * c)
    r = int(big[-1])
    target = np.zeros(coeffs.shape, dtype=complex)
    for k in range(r + 1):
        target[k, k] = c * comb(r, k)
    if np.abs(coeffs - target).max() > tol * c:
        return None
    return BinomialMatch(r, float(c))
