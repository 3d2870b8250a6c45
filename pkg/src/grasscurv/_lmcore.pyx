# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled constraint residual and multistart LM kernels.

Same contract as ``_lmcore_py``; see that module for the array encoding.
"""
import numpy as np

from libc.math cimport sqrt, INFINITY


cdef struct Ctx:
    int S, T, C, G, V, dim, nres
    const int* slot_re
    const int* slot_im
    const int* term_coord
    const int* term_u
    const int* term_v
    const double* term_sign
    const int* coord_group
    const double* rhs
    double* vre
    double* vim
    double* cre
    double* cim
    double* dre
    double* dim_


cdef inline void _dadd(Ctx* c, int k, int a, double sg, double br, double bi) noexcept nogil:
    # d(coord k) += sg * d(slot a) * b, with d(slot)/d(re) = 1 and d(slot)/d(im) = i
    cdef int col
    col = c.slot_re[a]
    if col >= 0:
        c.dre[k * c.dim + col] += sg * br
        c.dim_[k * c.dim + col] += sg * bi
    col = c.slot_im[a]
    if col >= 0:
        c.dre[k * c.dim + col] -= sg * bi
        c.dim_[k * c.dim + col] += sg * br


cdef void _eval(Ctx* c, const double* x, double* out, double* J) noexcept nogil:
    """Residual into ``out``; row-major Jacobian into ``J`` unless it is NULL."""
    cdef int s, t, k, g, u, v, j, row
    cdef double ur, ui, wr, wi, sg, cr, ci
    cdef bint jac = J != NULL
    cdef int dim = c.dim
    for s in range(c.S):
        c.vre[s] = x[c.slot_re[s]] if c.slot_re[s] >= 0 else 0.0
        c.vim[s] = x[c.slot_im[s]] if c.slot_im[s] >= 0 else 0.0
    for k in range(c.C):
        c.cre[k] = 0.0
        c.cim[k] = 0.0
    if jac:
        for j in range(c.C * dim):
            c.dre[j] = 0.0
            c.dim_[j] = 0.0
    for t in range(c.T):
        u = c.term_u[t]
        v = c.term_v[t]
        if u < 0:
            ur = 1.0
            ui = 0.0
        else:
            ur = c.vre[u]
            ui = c.vim[u]
        if v < 0:
            wr = 1.0
            wi = 0.0
        else:
            wr = c.vre[v]
            wi = c.vim[v]
        sg = c.term_sign[t]
        k = c.term_coord[t]
        c.cre[k] += sg * (ur * wr - ui * wi)
        c.cim[k] += sg * (ur * wi + ui * wr)
        if jac:
            if u >= 0:
                _dadd(c, k, u, sg, wr, wi)
            if v >= 0:
                _dadd(c, k, v, sg, ur, ui)
    for g in range(c.nres):
        out[g] = -c.rhs[g] if g < c.G else 0.0
        if jac:
            for j in range(dim):
                J[g * dim + j] = 0.0
    for k in range(c.C):
        g = c.coord_group[k]
        cr = c.cre[k]
        ci = c.cim[k]
        if g < c.G:
            out[g] += cr * cr + ci * ci
            if jac:
                for j in range(dim):
                    J[g * dim + j] += 2.0 * (cr * c.dre[k * dim + j] + ci * c.dim_[k * dim + j])
        else:
            row = c.G + 2 * (g - c.G)
            out[row] = cr
            out[row + 1] = ci
            if jac:
                for j in range(dim):
                    J[row * dim + j] = c.dre[k * dim + j]
                    J[(row + 1) * dim + j] = c.dim_[k * dim + j]


cdef double _sumsq(const double* r, int n) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(n):
        acc += r[i] * r[i]
    return acc


cdef bint _cholesky_solve(double* M, double* b, int n) noexcept nogil:
    """In-place Cholesky of the n x n matrix M, then solve M y = b into b."""
    cdef int i, j, k
    cdef double acc
    for j in range(n):
        acc = M[j * n + j]
        for k in range(j):
            acc -= M[j * n + k] * M[j * n + k]
        if not acc > 0.0:
            return False
        M[j * n + j] = sqrt(acc)
        for i in range(j + 1, n):
            acc = M[i * n + j]
            for k in range(j):
                acc -= M[i * n + k] * M[j * n + k]
            M[i * n + j] = acc / M[j * n + j]
    for i in range(n):
        acc = b[i]
        for k in range(i):
            acc -= M[i * n + k] * b[k]
        b[i] = acc / M[i * n + i]
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for k in range(i + 1, n):
            acc -= M[k * n + i] * b[k]
        b[i] = acc / M[i * n + i]
    return True


cdef double _lm_single(Ctx* c, double* x, int max_iter, double stop_tol,
                       double* r, double* rn, double* xn, double* J, double* A, double* M,
                       double* g, double* step) noexcept nogil:
    cdef int dim = c.dim, nres = c.nres
    cdef int it, j, i, k, tries, stall = 0
    cdef double f, fn, f_old = 0.0, lam = 1e-3, mu, acc, gain = 0.0
    cdef bint accepted
    _eval(c, x, r, J)
    f = _sumsq(r, nres)
    for it in range(max_iter):
        if f <= stop_tol:
            break
        mu = 1e-12
        for j in range(dim):
            for k in range(dim):
                acc = 0.0
                for i in range(nres):
                    acc += J[i * dim + j] * J[i * dim + k]
                A[j * dim + k] = acc
            acc = 0.0
            for i in range(nres):
                acc += J[i * dim + j] * r[i]
            g[j] = acc
            if A[j * dim + j] > mu:
                mu = A[j * dim + j]
        accepted = False
        for tries in range(12):
            for j in range(dim * dim):
                M[j] = A[j]
            for j in range(dim):
                M[j * dim + j] += lam * mu
                step[j] = g[j]
            if not _cholesky_solve(M, step, dim):
                lam *= 10.0
                continue
            for j in range(dim):
                xn[j] = x[j] - step[j]
            _eval(c, xn, rn, NULL)
            fn = _sumsq(rn, nres)
            if fn < f:
                accepted = True
                gain = f - fn
                f_old = f
                for j in range(dim):
                    x[j] = xn[j]
                _eval(c, x, r, J)
                f = _sumsq(r, nres)
                lam = lam * 0.3 if lam * 0.3 > 1e-15 else 1e-15
                break
            lam *= 4.0
        if not accepted:
            break
        if gain <= 1e-12 * f_old:
            stall += 1
            if stall >= 5:
                break
        else:
            stall = 0
    return f


cdef class _System:
    """Owns contiguous copies of the encoded system and the scratch buffers."""

    cdef const int[::1] sre, sim, tc, tu, tv, cg
    cdef const double[::1] ts, rh
    cdef double[::1] work
    cdef Ctx ctx

    def __init__(self, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                 int n_vanish, int dim):
        i32 = lambda a: np.ascontiguousarray(a, dtype=np.int32)
        self.sre = i32(slot_re)
        self.sim = i32(slot_im)
        self.tc = i32(term_coord)
        self.tu = i32(term_u)
        self.tv = i32(term_v)
        self.cg = i32(coord_group)
        self.ts = np.ascontiguousarray(term_sign, dtype=np.float64)
        self.rh = np.ascontiguousarray(rhs, dtype=np.float64)
        cdef int S = self.sre.shape[0], C = self.cg.shape[0]
        cdef int D = dim if dim > 0 else 1
        self.work = np.zeros(2 * S + 2 * C + 2 * C * D + 2)
        cdef Ctx* c = &self.ctx
        c.S = S
        c.T = self.tc.shape[0]
        c.C = C
        c.G = self.rh.shape[0]
        c.V = n_vanish
        c.dim = dim
        c.nres = c.G + 2 * n_vanish
        c.slot_re = &self.sre[0]
        c.slot_im = &self.sim[0]
        c.term_coord = &self.tc[0]
        c.term_u = &self.tu[0]
        c.term_v = &self.tv[0]
        c.term_sign = &self.ts[0]
        c.coord_group = &self.cg[0]
        c.rhs = &self.rh[0]
        c.vre = &self.work[0]
        c.vim = &self.work[S + 1]
        c.cre = &self.work[2 * S + 2]
        c.cim = &self.work[2 * S + 2 + C]
        c.dre = &self.work[2 * S + 2 + 2 * C]
        c.dim_ = &self.work[2 * S + 2 + 2 * C + C * D]


def _evaluate(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish,
              bint with_jac):
    xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef int dim = xa.shape[0]
    cdef _System sys = _System(slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                               int(n_vanish), dim)
    cdef double[::1] xv = np.concatenate([xa, [0.0]])
    out = np.empty(sys.ctx.nres)
    J = np.zeros((sys.ctx.nres, max(dim, 1)))
    cdef double[::1] ov = out
    cdef double[:, ::1] jv = J
    _eval(&sys.ctx, &xv[0], &ov[0], &jv[0, 0] if with_jac else NULL)
    return out, J[:, :dim]


def residuals(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish):
    return _evaluate(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                     n_vanish, False)[0]


def jacobian(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish):
    return _evaluate(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                     n_vanish, True)[1]


def multistart(starts, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
               n_vanish, max_iter, stop_tol, certify_tol, stop_on_solve):
    """Run LM from each row of ``starts``; returns
    ``(best_x, best_f, best_index, restarts_used, finals)``."""
    st = np.array(starts, dtype=np.float64, order="C", ndmin=2)
    cdef double[:, ::1] sv = st
    cdef int nstart = sv.shape[0], dim = sv.shape[1]
    cdef _System sys = _System(slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                               int(n_vanish), dim)
    cdef int nres = sys.ctx.nres
    cdef int D = dim if dim > 0 else 1
    cdef double[::1] r = np.zeros(nres)
    cdef double[::1] rn = np.zeros(nres)
    cdef double[::1] xn = np.zeros(D)
    cdef double[::1] x = np.zeros(D)
    cdef double[::1] J = np.zeros(nres * D)
    cdef double[::1] A = np.zeros(D * D)
    cdef double[::1] M = np.zeros(D * D)
    cdef double[::1] g = np.zeros(D)
    cdef double[::1] step = np.zeros(D)
    finals = np.full(nstart, np.nan)
    cdef double[::1] fv = finals
    best_x = st[0].copy() if nstart else np.empty(0)
    cdef double best_f = INFINITY, f
    cdef int best_i = -1, used = 0, k, j
    cdef int it_max = int(max_iter)
    cdef double stol = float(stop_tol), ctol = float(certify_tol)
    cdef bint stop = bool(stop_on_solve)
    for k in range(nstart):
        for j in range(dim):
            x[j] = sv[k, j]
        with nogil:
            f = _lm_single(&sys.ctx, &x[0], it_max, stol, &r[0], &rn[0], &xn[0], &J[0], &A[0], &M[0],
                           &g[0], &step[0])
        fv[k] = f
        used = k + 1
        if f < best_f:
            best_f = f
            best_i = k
            best_x = np.asarray(x)[:dim].copy()
        if stop and f <= ctol:
            break
    return best_x, best_f, best_i, used, finals[:used]
