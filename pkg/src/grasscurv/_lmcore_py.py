"""Pure-Python implementation of the constraint residual and multistart LM kernels.

Mirrors ``_lmcore.pyx`` call for call; selected at import when the compiled
extension is unavailable (see :mod:`grasscurv.kernels`).

System encoding (shared with the compiled core):

``slot_re, slot_im`` (int32, one per coefficient slot)
    index into the unknown vector for the real/imaginary part, ``-1`` for 0.
``term_coord, term_u, term_v, term_sign`` (one per monomial term)
    coordinate ``term_coord`` gains ``sign * slot[u] * slot[v]``; a slot
    index of ``-1`` stands for the constant 1.
``coord_group`` (one per coordinate)
    ``g < n_groups``: ``|coord|^2`` is summed into equation ``g``;
    ``g >= n_groups``: the coordinate must vanish and contributes its real
    and imaginary parts as residual components ``n_groups + 2 (g - n_groups)``
    and the one after.
``rhs`` (float64, ``n_groups``)
    right-hand side of each summed equation.

The Jacobian is exact: every residual is a polynomial of degree at most 4.
"""
from __future__ import annotations

import numpy as np


def _slot_values(x, slot_re, slot_im):
    S = slot_re.shape[0]
    vals = np.zeros(S + 1, dtype=complex)
    vals[S] = 1.0
    for s in range(S):
        re = x[slot_re[s]] if slot_re[s] >= 0 else 0.0
        im = x[slot_im[s]] if slot_im[s] >= 0 else 0.0
        vals[s] = complex(re, im)
    return vals


def _evaluate(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish,
              with_jac):
    S = slot_re.shape[0]
    dim = x.shape[0]
    vals = _slot_values(x, slot_re, slot_im)
    C = coord_group.shape[0]
    cv = np.zeros(C, dtype=complex)
    dc = np.zeros((C, dim), dtype=complex) if with_jac else None
    for t in range(term_coord.shape[0]):
        u = term_u[t] if term_u[t] >= 0 else S
        v = term_v[t] if term_v[t] >= 0 else S
        k = term_coord[t]
        sg = term_sign[t]
        cv[k] += sg * (vals[u] * vals[v])
        if with_jac:
            for a, b in ((u, v), (v, u)):
                if a < S:
                    if slot_re[a] >= 0:
                        dc[k, slot_re[a]] += sg * vals[b]
                    if slot_im[a] >= 0:
                        dc[k, slot_im[a]] += sg * 1j * vals[b]
    G = rhs.shape[0]
    out = np.empty(G + 2 * n_vanish)
    out[:G] = -rhs
    J = np.zeros((out.shape[0], dim)) if with_jac else None
    for k in range(C):
        g = coord_group[k]
        c = cv[k]
        if g < G:
            out[g] += c.real * c.real + c.imag * c.imag
            if with_jac:
                J[g] += 2.0 * (c.real * dc[k].real + c.imag * dc[k].imag)
        else:
            row = G + 2 * (g - G)
            out[row] = c.real
            out[row + 1] = c.imag
            if with_jac:
                J[row] = dc[k].real
                J[row + 1] = dc[k].imag
    return out, J


def residuals(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish):
    x = np.asarray(x, dtype=float)
    return _evaluate(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                     n_vanish, False)[0]


def jacobian(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish):
    x = np.asarray(x, dtype=float)
    return _evaluate(x, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
                     n_vanish, True)[1]


def _lm_single(x, system, max_iter, stop_tol):
    r, J = _evaluate(x, *system, True)
    f = float(r @ r)
    lam = 1e-3
    stall = 0
    dim = x.shape[0]
    for _ in range(max_iter):
        if f <= stop_tol:
            break
        A = J.T @ J
        g = J.T @ r
        mu = max(float(np.diag(A).max()), 1e-12)
        accepted = False
        for _ in range(12):
            M = A + (lam * mu) * np.eye(dim)
            try:
                L = np.linalg.cholesky(M)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            step = np.linalg.solve(L.T, np.linalg.solve(L, g))
            xn = x - step
            rn = _evaluate(xn, *system, False)[0]
            fn = float(rn @ rn)
            if fn < f:
                accepted = True
                gain = f - fn
                f_old = f
                x = xn
                r, J = _evaluate(x, *system, True)
                f = float(r @ r)
                lam = max(lam * 0.3, 1e-15)
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
    return x, f


def multistart(starts, slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs,
               n_vanish, max_iter, stop_tol, certify_tol, stop_on_solve):
    """Run LM from each row of ``starts``; returns
    ``(best_x, best_f, best_index, restarts_used, finals)``.

    Ties in the final residual keep the lower start index.
    """
    starts = np.asarray(starts, dtype=float)
    system = (slot_re, slot_im, term_coord, term_u, term_v, term_sign, coord_group, rhs, n_vanish)
    nstart = starts.shape[0]
    finals = np.full(nstart, np.nan)
    best_x, best_f, best_i = None, np.inf, -1
    used = 0
    for k in range(nstart):
        x, f = _lm_single(starts[k].copy(), system, max_iter, stop_tol)
        finals[k] = f
        used = k + 1
        if f < best_f:
            best_x, best_f, best_i = x, f, k
        if stop_on_solve and f <= certify_tol:
            break
    if best_x is None:
        best_x = starts[0].copy() if nstart else np.empty(0)
    return best_x, best_f, best_i, used, finals[:used]
