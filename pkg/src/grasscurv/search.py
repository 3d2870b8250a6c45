"""Monomial ansatz for G(2, n), binomial constraint systems and multistart search.

The ansatz takes ``K[i] = (alpha_i x**r_i, beta_i x**s_i)`` with
``s_i - r_i = s_1 - r_1``.  With ``p12 = 1`` every Pluecker coordinate is a
single monomial:

* ``p(1, i+2) = beta_i x**s_i``
* ``p(2, i+2) = -alpha_i x**r_i``
* ``p(i+2, j+2) = gamma_ij x**(r_i + s_j)``, ``gamma_ij = alpha_i beta_j - alpha_j beta_i``

so ``detM = sum_k (sum of |coef|^2 over power k) |x|^(2k)`` and constant
curvature ``4/R`` is the system ``sum_{power k} |coef|^2 = C(R, k)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb, inf, isfinite, sqrt
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .curvature import constant_curvature_check
from .errors import BadExponents, PowerMismatch
from .grassmann import MacfarlaneMap, embed_pad, macfarlane_gram_det
from .polyhermite import HermitianPoly, HoloPoly
from .veronese import VeroneseSpec, veronese_macfarlane

CERTIFY_TOL = 1e-10
MAX_ITER = 200
STOP_TOL = 1e-26
DEFAULT_RESTARTS = 100
DEFAULT_SEED = 42
FLOOR_LABEL = "no solution found above floor"


def _slot_row(name: str) -> tuple[str, int]:
    for head in ("alpha", "beta"):
        if name.startswith(head) and name[len(head):].isdigit():
            return head, int(name[len(head):])
    raise BadExponents(f"unknown coefficient slot {name!r}")


@dataclass(frozen=True)
class Coordinate:
    """One Pluecker coordinate of the ansatz: ``sum sign * slot_u * slot_v`` times ``x**power``.

    ``None`` in a term stands for the constant 1.
    """

    label: tuple[int, int]
    power: int
    terms: tuple[tuple[float, str | None, str | None], ...]


@dataclass(frozen=True)
class MonomialAnsatz:
    n: int
    r: tuple[int, ...]
    s1: int
    pinned: frozenset = frozenset()
    vanishing: frozenset = frozenset()

    @property
    def s(self) -> tuple[int, ...]:
        return tuple(ri + self.s1 - self.r[0] for ri in self.r)

    @property
    def slots(self) -> list[str]:
        k = self.n - 2
        return [f"alpha{i}" for i in range(1, k + 1)] + [f"beta{i}" for i in range(1, k + 1)]

    def tag(self, slot: str) -> str:
        """``"zero"``, ``"real"`` or ``"complex"``: the gauge leaves the alphas and beta1 real."""
        if slot in self.pinned:
            return "zero"
        head, i = _slot_row(slot)
        return "real" if head == "alpha" or i == 1 else "complex"

    def coordinates(self) -> list[Coordinate]:
        """Structurally nonzero coordinates, including those constrained to vanish."""
        k = self.n - 2
        r, s = self.r, self.s
        live = lambda name: name not in self.pinned  # noqa: E731
        out = [Coordinate((1, 2), 0, ((1.0, None, None),))]
        for i in range(1, k + 1):
            if live(f"beta{i}"):
                out.append(Coordinate((1, i + 2), s[i - 1], ((1.0, f"beta{i}", None),)))
            if live(f"alpha{i}"):
                out.append(Coordinate((2, i + 2), r[i - 1], ((-1.0, f"alpha{i}", None),)))
        for i, j in combinations(range(1, k + 1), 2):
            terms = []
            if live(f"alpha{i}") and live(f"beta{j}"):
                terms.append((1.0, f"alpha{i}", f"beta{j}"))
            if live(f"alpha{j}") and live(f"beta{i}"):
                terms.append((-1.0, f"alpha{j}", f"beta{i}"))
            if terms:
                out.append(Coordinate((i + 2, j + 2), r[i - 1] + s[j - 1], tuple(terms)))
        return sorted(out, key=lambda c: c.label)

    def gamma_label(self, i: int, j: int) -> tuple[int, int]:
        return (i + 2, j + 2)

    def powers(self) -> list[int]:
        """Powers of the coordinates that may be nonzero, in label order."""
        return [c.power for c in self.coordinates() if c.label not in self._vanishing_labels()]

    def _vanishing_labels(self) -> set:
        return {self.gamma_label(i, j) for i, j in self.vanishing}

    @property
    def max_power(self) -> int:
        return max(self.powers())

    def describe(self) -> dict:
        return {
            "n": self.n,
            "r": list(self.r),
            "s1": self.s1,
            "r2": self.r[1] if len(self.r) > 1 else None,
            "pinned": sorted(self.pinned),
            "vanishing": [list(p) for p in sorted(self.vanishing)],
        }

    def label(self) -> str:
        out = f"r={self.r} s1={self.s1}"
        if self.pinned:
            out += " pinned=" + ",".join(sorted(self.pinned))
        if self.vanishing:
            out += " vanish=" + ",".join(f"gamma{i}{j}" for i, j in sorted(self.vanishing))
        return out

    def to_macfarlane(self, values: dict) -> MacfarlaneMap:
        k = self.n - 2
        K = []
        for i in range(1, k + 1):
            a = values.get(f"alpha{i}", 0.0)
            b = values.get(f"beta{i}", 0.0)
            K.append([HoloPoly.monomial(a, self.r[i - 1]), HoloPoly.monomial(b, self.s[i - 1])])
        return MacfarlaneMap(K, self.n, 2)


def build_ansatz(n: int, r: Sequence[int], s1: int, zero_pattern: Iterable[str] = (),
                 vanishing: Iterable[tuple[int, int]] = (), relax_r1: bool = False) -> MonomialAnsatz:
    """Validate exponents and zero pattern; ``vanishing`` lists gamma pairs ``(i, j)``, ``i < j``, forced to 0."""
    r = tuple(int(v) for v in r)
    if n < 4:
        raise BadExponents(f"the ansatz needs n >= 4, got {n}")
    if len(r) != n - 2:
        raise BadExponents(f"need {n - 2} exponents r_i, got {len(r)}")
    if r[0] < 1 or (not relax_r1 and r[0] != 1):
        raise BadExponents(f"r1 must be 1, got {r[0]}")
    if any(a > b for a, b in zip(r, r[1:])):
        raise BadExponents(f"exponents must be nondecreasing, got {r}")
    if int(s1) < 1:
        raise BadExponents(f"s1 must be >= 1, got {s1}")
    pinned = frozenset(zero_pattern)
    for name in pinned:
        head, i = _slot_row(name)
        if not 1 <= i <= n - 2:
            raise BadExponents(f"slot {name} out of range for n={n}")
    van = frozenset(tuple(p) for p in vanishing)
    for i, j in van:
        if not 1 <= i < j <= n - 2:
            raise BadExponents(f"bad gamma pair {(i, j)}")
    return MonomialAnsatz(n, r, int(s1), pinned, van)


def _candidate(n: int, r: tuple, s1: int, R: int) -> MonomialAnsatz | None:
    """Exponents with every monomial above ``R`` removed: betas pinned, gammas forced to vanish."""
    s = tuple(ri + s1 - r[0] for ri in r)
    pins = frozenset(f"beta{i + 1}" for i, si in enumerate(s) if si > R)
    a = MonomialAnsatz(n, r, s1, pins)
    van = frozenset((c.label[0] - 2, c.label[1] - 2) for c in a.coordinates()
                    if c.power > R and c.label[0] >= 3)
    a = MonomialAnsatz(n, r, s1, pins, van)
    return a if a.powers() and a.max_power == R else None


def enumerate_exponents(n: int, target_r: int, relax_r1: bool = False, cover: bool = True) -> list[MonomialAnsatz]:
    """Exponent branches whose top achievable Pluecker power is ``target_r``.

    Caps ``r_i <= target_r`` and ``s1 <= target_r``.  Monomials of power
    above the target are removed by pinning the beta (when ``s_i`` is too
    large) or by requiring the gamma to vanish.  Any other zero pattern is a
    special case of the branch with the same exponents.  With ``cover`` only
    branches reaching every power ``0..target_r`` are kept (each equation has
    a positive right-hand side).  For ``n = 4`` one representative per
    transposition pair ``(r2, s1) <-> (s1, r2)`` is returned.
    """
    R = int(target_r)
    if R < 1:
        raise ValueError("target_r must be >= 1")
    out = []
    for r1 in (range(1, R + 1) if relax_r1 else (1,)):
        for tail in combinations_with_replacement(range(r1, R + 1), n - 3):
            r = (r1,) + tail
            for s1 in range(1, R + 1):
                if n == 4 and r[1] < s1 + r1 - 1:
                    continue
                a = _candidate(n, r, s1, R)
                if a is None:
                    continue
                if cover and set(a.powers()) != set(range(R + 1)):
                    continue
                out.append(a)
    return out


def missing_powers(a: MonomialAnsatz, target_r: int) -> list[int]:
    return sorted(set(range(target_r + 1)) - set(a.powers()))


@dataclass(frozen=True)
class Equation:
    power: int
    labels: tuple
    rhs: float


class ConstraintSystem:
    """Real least-squares system ``sum_{power k} |coef|^2 - C(R, k) = 0`` plus vanishing gammas."""

    def __init__(self, ansatz: MonomialAnsatz, target_r: int):
        self.ansatz = ansatz
        self.target_r = R = int(target_r)
        coords = ansatz.coordinates()
        van_labels = ansatz._vanishing_labels()
        unknowns = []
        slot_re, slot_im = [], []
        for name in ansatz.slots:
            tag = ansatz.tag(name)
            if tag == "zero":
                slot_re.append(-1)
                slot_im.append(-1)
            elif tag == "real":
                slot_re.append(len(unknowns))
                slot_im.append(-1)
                unknowns.append(name)
            else:
                slot_re.append(len(unknowns))
                slot_im.append(len(unknowns) + 1)
                unknowns += [f"{name}.re", f"{name}.im"]
        index = {name: i for i, name in enumerate(ansatz.slots)}
        groups: dict[int, list] = {k: [] for k in range(R + 1)}
        vanish = []
        coord_group = []
        term_coord, term_u, term_v, term_sign = [], [], [], []
        for ci, c in enumerate(coords):
            if c.label in van_labels:
                coord_group.append(R + 1 + len(vanish))
                vanish.append(c.label)
            else:
                if c.power > R:
                    raise PowerMismatch(f"coordinate p{c.label} has power {c.power} > {R}")
                coord_group.append(c.power)
                groups[c.power].append(c.label)
            for sign, u, v in c.terms:
                term_coord.append(ci)
                term_u.append(index[u] if u else -1)
                term_v.append(index[v] if v else -1)
                term_sign.append(sign)
        self.coordinates = coords
        self.unknowns = tuple(unknowns)
        self.equations = tuple(Equation(k, tuple(groups[k]), float(comb(R, k))) for k in range(R + 1))
        self.vanishing = tuple(vanish)
        i32 = lambda v: np.asarray(v, dtype=np.int32)  # noqa: E731
        self._arrays = (
            i32(slot_re), i32(slot_im), i32(term_coord), i32(term_u), i32(term_v),
            np.asarray(term_sign, dtype=float), i32(coord_group),
            np.array([e.rhs for e in self.equations]),
        )

    @property
    def dim(self) -> int:
        return len(self.unknowns)

    @property
    def upper(self) -> float:
        """Side of the start box: ``sqrt(max RHS)``."""
        return sqrt(max(e.rhs for e in self.equations))

    def residual_vector(self, x, backend=None) -> np.ndarray:
        impl = kernels.get_backend(backend)
        return impl.residuals(np.asarray(x, dtype=float), *self._arrays, len(self.vanishing))

    def jacobian(self, x, backend=None) -> np.ndarray:
        impl = kernels.get_backend(backend)
        return impl.jacobian(np.asarray(x, dtype=float), *self._arrays, len(self.vanishing))

    def residual(self, x, backend=None) -> float:
        v = self.residual_vector(x, backend)
        return float(v @ v)

    def lhs(self, x) -> np.ndarray:
        """Left-hand sides ``sum |coef|^2`` per power."""
        v = self.residual_vector(x)[: self.target_r + 1]
        return v + self._arrays[-1]

    def point(self, values: dict) -> np.ndarray:
        """Unknown vector from slot values (complex or real)."""
        x = np.zeros(self.dim)
        for name in self.ansatz.slots:
            val = complex(values.get(name, 0.0))
            tag = self.ansatz.tag(name)
            if tag == "real":
                x[self.unknowns.index(name)] = val.real
            elif tag == "complex":
                x[self.unknowns.index(f"{name}.re")] = val.real
                x[self.unknowns.index(f"{name}.im")] = val.imag
        return x

    def slot_values(self, x) -> dict:
        out = {}
        for name in self.ansatz.slots:
            tag = self.ansatz.tag(name)
            if tag == "zero":
                out[name] = 0.0
            elif tag == "real":
                out[name] = float(x[self.unknowns.index(name)])
            else:
                out[name] = complex(x[self.unknowns.index(f"{name}.re")], x[self.unknowns.index(f"{name}.im")])
        return out

    def macfarlane(self, x) -> MacfarlaneMap:
        return self.ansatz.to_macfarlane(self.slot_values(x))

    def __repr__(self):
        return f"ConstraintSystem({self.ansatz.label()}, R={self.target_r}, dim={self.dim})"


def constraints_from_ansatz(a: MonomialAnsatz, target_r: int) -> ConstraintSystem:
    if a.max_power != target_r:
        raise PowerMismatch(f"ansatz reaches power {a.max_power}, target is {target_r}")
    return ConstraintSystem(a, target_r)


@dataclass
class SolveOutcome:
    status: str
    best_point: dict
    residual: float
    restarts_used: int
    seed: int
    system: ConstraintSystem | None = field(default=None, repr=False, compare=False)
    x: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.status == "solved" and not self.residual <= CERTIFY_TOL:
            raise ValueError("solved outcome with residual above the certification tolerance")

    def witness(self) -> MacfarlaneMap | None:
        if self.status != "solved" or self.system is None:
            return None
        return self.system.macfarlane(self.x)

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "best_point": {k: float(v) for k, v in self.best_point.items()},
            "residual": self.residual,
            "restarts_used": self.restarts_used,
            "seed": self.seed,
        }
        if self.system is not None:
            out["branch"] = self.system.ansatz.describe()
            out["target_r"] = self.system.target_r
        return out


def solve_multistart(sys: ConstraintSystem, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED,
                     certify_tol: float = CERTIFY_TOL, max_iter: int = MAX_ITER, stop_on_solve: bool = True,
                     backend: str | None = None) -> SolveOutcome:
    """Damped least squares from ``restarts`` uniform starts in ``[0, U]^dim``.

    Deterministic in ``seed``.  Stops at the first start that certifies
    when ``stop_on_solve``; otherwise reports the best of all starts, with
    ties going to the lower start index.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = rng.uniform(0.0, sys.upper, (restarts, sys.dim))
    if sys.dim == 0:
        f = sys.residual(np.empty(0))
        status = "solved" if f <= certify_tol else "degenerate"
        return SolveOutcome(status, {}, f, 1, seed, sys, np.empty(0))
    impl = kernels.get_backend(backend)
    x, f, _, used, _ = impl.multistart(starts, *sys._arrays, len(sys.vanishing), max_iter,
                                       STOP_TOL, certify_tol, stop_on_solve)
    x = np.asarray(x, dtype=float)
    if not isfinite(f):
        return SolveOutcome("degenerate", dict(zip(sys.unknowns, x)), float("nan"), used, seed, sys, x)
    status = "solved" if f <= certify_tol else "residual_floor"
    return SolveOutcome(status, dict(zip(sys.unknowns, x.tolist())), float(f), int(used), seed, sys, x)


def certified_residual(mmap: MacfarlaneMap, r: int) -> float:
    """``sum |c_jk - C(r, j) delta_jk|^2`` over the coefficients of ``detM``."""
    d = macfarlane_gram_det(mmap).coeffs
    t = HermitianPoly.one_plus_abs2_pow(r).coeffs
    size = max(d.shape[0], t.shape[0])
    pad = lambda a: np.pad(a, ((0, size - a.shape[0]), (0, size - a.shape[1])))  # noqa: E731
    return float(np.sum(np.abs(pad(d) - pad(t)) ** 2))


def g26_r7_pattern() -> MonomialAnsatz:
    """The G(2, 6), R = 7 branch ``r = (1, 2, 3, 3)``, ``s1 = 2`` with ``alpha4 = 0``."""
    return build_ansatz(6, (1, 2, 3, 3), 2, zero_pattern=("alpha4",))


def g26_r7_reference_point() -> dict:
    """Seven-digit solution of :func:`g26_r7_pattern`, with ``alpha1 = sqrt 7`` and ``alpha3 = 1/beta4``."""
    b4 = -0.1926106
    return {
        "alpha1": sqrt(7.0), "alpha2": -4.5562275, "alpha3": 1.0 / b4,
        "beta1": -0.4907042, "beta2": 2.8363697, "beta3": 2.6842282, "beta4": b4,
    }


def _presets(n: int, R: int) -> list[MonomialAnsatz]:
    return [g26_r7_pattern()] if (n, R) == (6, 7) else []


@dataclass
class ProbeResult:
    floor: float
    trace: list[dict]
    label: str = FLOOR_LABEL

    def to_dict(self) -> dict:
        return {"floor": self.floor if isfinite(self.floor) else None, "label": self.label, "trace": self.trace}


def infeasibility_probe(systems, budget: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED,
                        backend: str | None = None) -> ProbeResult:
    """Best residual over every system, each minimised from ``budget`` starts.

    A small floor means a solution was found; a large one is evidence, not
    proof, that none exists.
    """
    if isinstance(systems, ConstraintSystem):
        systems = [systems]
    trace = []
    best = inf
    for sys in systems:
        out = solve_multistart(sys, budget, seed, stop_on_solve=False, backend=backend)
        trace.append({**sys.ansatz.describe(), "kind": "searched", "floor": out.residual,
                      "restarts": out.restarts_used})
        best = min(best, out.residual)
    label = "solution found" if best <= CERTIFY_TOL else FLOOR_LABEL
    return ProbeResult(best, trace, label)


def pruned_trace(n: int, target_r: int, relax_r1: bool = False) -> list[dict]:
    """Branches that miss some power ``k``, with the exact residual lower bound ``sum C(R, k)^2``."""
    out = []
    for a in enumerate_exponents(n, target_r, relax_r1, cover=False):
        miss = missing_powers(a, target_r)
        if miss:
            bound = float(sum(comb(target_r, k) ** 2 for k in miss))
            out.append({**a.describe(), "kind": "pruned", "floor": bound, "missing": miss})
    return out


def _floor(trace: list[dict]) -> ProbeResult:
    best = min((t["floor"] for t in trace), default=inf)
    return ProbeResult(best, trace, "solution found" if best <= CERTIFY_TOL else FLOOR_LABEL)


def probe_target(n: int, target_r: int, budget: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED,
                 relax_r1: bool = False) -> ProbeResult:
    """Probe every branch for ``(n, target_r)``.

    Branches that miss some power are not minimised; their exact lower
    bound enters the floor instead.
    """
    systems = [constraints_from_ansatz(a, target_r)
               for a in _presets(n, target_r) + enumerate_exponents(n, target_r, relax_r1)]
    res = infeasibility_probe(systems, budget, seed)
    return _floor(res.trace + pruned_trace(n, target_r, relax_r1))


@dataclass
class Witness:
    mmap: MacfarlaneMap
    source: str
    branch: dict | None = None
    solver_residual: float | None = None
    restarts: int = 0


def verify_witness(mmap: MacfarlaneMap, target_r: int) -> bool:
    """``detM`` of the map matches ``(1 + |x|^2)**target_r`` to the binomial tolerance."""
    rep = constant_curvature_check(macfarlane_gram_det(mmap))
    return rep.constant and rep.r == target_r


def search_target(n: int, target_r: int, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED,
                  relax_r1: bool = False) -> tuple[SolveOutcome | None, list[dict]]:
    """Try each branch in turn; return the first verified solution (or the best floor) and the trace.

    A solved outcome whose map fails the binomial check is recorded as
    ``unverified`` and the search moves on.
    """
    best = None
    trace = []
    for a in _presets(n, target_r) + enumerate_exponents(n, target_r, relax_r1):
        sys = constraints_from_ansatz(a, target_r)
        out = solve_multistart(sys, restarts, seed)
        entry = {**a.describe(), "kind": "searched", "floor": out.residual, "restarts": out.restarts_used}
        trace.append(entry)
        if out.status == "solved" and not verify_witness(out.witness(), target_r):
            entry["kind"] = "unverified"
            continue
        if best is None or out.residual < best.residual or out.status == "solved":
            best = out
        if out.status == "solved":
            break
    return best, trace


@lru_cache(maxsize=None)
def _attempt(n: int, target_r: int, restarts: int, seed: int) -> tuple[Witness | None, tuple]:
    if target_r == 2 * (n - 2):
        return Witness(veronese_macfarlane(VeroneseSpec(n, 2)), "veronese"), ()
    if n >= 5 and target_r <= 2 * (n - 3):
        w, _ = _attempt(n - 1, target_r, restarts, seed)
        if w is not None:
            return Witness(embed_pad(w.mmap), "embedding", w.branch, w.solver_residual, w.restarts), ()
    out, trace = search_target(n, target_r, restarts, seed)
    if out is None or out.status != "solved":
        return None, tuple(trace)
    return Witness(out.witness(), "search", out.system.ansatz.describe(), out.residual, out.restarts_used), tuple(trace)


def find_witness(n: int, target_r: int, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED) -> Witness | None:
    """A constant-curvature map of G(2, n) with ``detM = (1 + |x|^2)**target_r``, if one is found.

    Order of attempts: the Veronese curve at ``r = 2(n - 2)``, a padded
    witness from ``n - 1``, then the ansatz search.
    """
    return _attempt(n, target_r, restarts, seed)[0]


@dataclass
class ClassRow:
    r: int
    status: str
    kappa: float | None
    residual: float | None
    source: str | None
    witness: MacfarlaneMap | None = field(default=None, repr=False)
    branch: dict | None = None
    trace: list = field(default_factory=list, repr=False)
    label: str | None = None

    def to_dict(self) -> dict:
        return {
            "r": self.r, "status": self.status, "kappa": self.kappa, "residual": self.residual,
            "source": self.source, "branch": self.branch, "label": self.label, "trace": self.trace,
        }


def classify(n: int, r_range: Iterable[int], restarts: int = DEFAULT_RESTARTS,
             seed: int = DEFAULT_SEED) -> list[ClassRow]:
    """Constant-curvature classification table for G(2, n) over ``r_range``.

    Solved rows carry a witness re-verified by the binomial check; other
    rows carry the residual floor over every branch.
    """
    if n not in (4, 5, 6):
        warnings.warn(f"n={n} has no preset: the branch list is not known to be exhaustive", stacklevel=2)
    rows = []
    for r in r_range:
        w, trace = _attempt(n, r, restarts, seed)
        if w is not None:
            if verify_witness(w.mmap, r):
                rows.append(ClassRow(r, "solved", 4 / r, certified_residual(w.mmap, r), w.source,
                                     w.mmap, w.branch))
                continue
        probe = _floor(list(trace) + pruned_trace(n, r))
        floor = probe.floor if isfinite(probe.floor) else None
        rows.append(ClassRow(r, "residual_floor", None, floor, None, None, None, probe.trace, probe.label))
    return rows
