"""Finite-field enumeration kernels for maximal isotropic subspaces.

Two interchangeable backends implement the same depth-first search:

* ``numba``: the whole search is one ``@njit`` function over int64 arrays;
* ``numpy``: a Python driver whose per-node work is vectorised with numpy.

The backend defaults to numba when it is importable and the environment
variable ``ISOINDEX_DISABLE_NUMBA`` is unset (or ``0``).

Search tree: a node is an isotropic subspace ``H`` stored as its RREF basis
(rows ordered by pivot).  Children are ``span(v) + H`` where ``v`` lies in the
complement ``W' = {v : phi(v, H) = 0, v[P] = 0}`` (``P`` the pivots of ``H``),
has leading column before the first pivot of ``H`` and satisfies
``phi(v, v) = 0``.  Stacking ``v`` above the rows of ``H`` is already RREF, so
every isotropic subspace is reached exactly once, from the span of its last
RREF rows.  ``H`` is maximal iff no nonzero ``v`` in ``W'`` has
``phi(v, v) = 0``; since ``phi(sum c_r u_r, same) = sum c_r^2 phi(u_r, u_r)``
this is a rank test on the diagonal values of a basis of ``W'``.
"""

from __future__ import annotations

import os
from itertools import product

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

__all__ = [
    "BudgetExceeded",
    "HAVE_NUMBA",
    "default_backend",
    "enumerate_maximal",
]

HAVE_NUMBA = numba is not None

STATUS_OK = 0
STATUS_BUDGET = 1


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would examine more candidates than allowed."""

    def __init__(self, required: int, budget: int, what: str = "candidate extensions"):
        super().__init__(f"enumeration budget exceeded: needs more than {budget} {what} "
                         f"(computed requirement {required})")
        self.required = required
        self.budget = budget


def _numba_disabled() -> bool:
    return os.environ.get("ISOINDEX_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not _numba_disabled() else "numpy"


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

@_njit
def _nb_rref(A, mul, add, neg, inv):
    rows, cols = A.shape
    piv = np.empty(max(min(rows, cols), 1), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        sel = -1
        for i in range(r, rows):
            if A[i, c] != 0:
                sel = i
                break
        if sel < 0:
            continue
        if sel != r:
            for j in range(cols):
                tmp = A[r, j]
                A[r, j] = A[sel, j]
                A[sel, j] = tmp
        iv = inv[A[r, c]]
        for j in range(cols):
            A[r, j] = mul[iv, A[r, j]]
        for i in range(rows):
            if i != r and A[i, c] != 0:
                f = neg[A[i, c]]
                for j in range(cols):
                    if A[r, j] != 0:
                        A[i, j] = add[A[i, j], mul[f, A[r, j]]]
        piv[r] = c
        r += 1
    return r, piv[:r]


@_njit
def _nb_complement(B, d, G, mul, add, neg, inv):
    """RREF basis and pivots of ``W' = {v : phi(v, B) = 0, v[P] = 0}``."""
    n = B.shape[1]
    m = G.shape[0]
    C = np.zeros((d * m + d, n), dtype=np.int64)
    row = 0
    for i in range(d):
        for t in range(m):
            for a in range(n):
                acc = 0
                for b in range(n):
                    if B[i, b] != 0 and G[t, a, b] != 0:
                        acc = add[acc, mul[G[t, a, b], B[i, b]]]
                C[row, a] = acc
            row += 1
    for i in range(d):
        for j in range(n):
            if B[i, j] != 0:
                C[row, j] = 1
                break
        row += 1
    rank, piv = _nb_rref(C, mul, add, neg, inv)
    s = n - rank
    U = np.zeros((s, n), dtype=np.int64)
    is_piv = np.zeros(n, dtype=np.bool_)
    for i in range(rank):
        is_piv[piv[i]] = True
    k = 0
    for f in range(n):
        if is_piv[f]:
            continue
        U[k, f] = 1
        for i in range(rank):
            U[k, piv[i]] = neg[C[i, f]]
        k += 1
    s2, upiv = _nb_rref(U, mul, add, neg, inv)
    return U, upiv, s


@_njit
def _nb_diag_values(U, G, mul, add):
    s, n = U.shape
    m = G.shape[0]
    Q = np.zeros((s, m), dtype=np.int64)
    for r in range(s):
        for t in range(m):
            acc = 0
            for a in range(n):
                if U[r, a] == 0:
                    continue
                for b in range(n):
                    if U[r, b] != 0 and G[t, a, b] != 0:
                        acc = add[acc, mul[U[r, a], mul[G[t, a, b], U[r, b]]]]
            Q[r, t] = acc
    return Q


@_njit
def _nb_grow(arr, dims, cap):
    new = np.zeros((cap, arr.shape[1], arr.shape[2]), dtype=np.int64)
    new[: arr.shape[0]] = arr
    nd = np.zeros(cap, dtype=np.int64)
    nd[: dims.shape[0]] = dims
    return new, nd


@_njit
def _nb_enumerate(G, n, q, char2, mul, add, neg, inv, budget):
    stack = np.zeros((64, n, n), dtype=np.int64)
    sdims = np.zeros(64, dtype=np.int64)
    out = np.zeros((16, n, n), dtype=np.int64)
    odims = np.zeros(16, dtype=np.int64)
    top = 1
    count = 0
    work = 0
    combo = np.zeros(n, dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    qv = np.zeros(max(G.shape[0], 1), dtype=np.int64)
    while top > 0:
        top -= 1
        B = stack[top].copy()
        d = sdims[top]
        work += 1
        if work > budget:
            return out[:count], odims[:count], STATUS_BUDGET, work
        U, upiv, s = _nb_complement(B, d, G, mul, add, neg, inv)
        Q = _nb_diag_values(U, G, mul, add)
        if char2:
            # maximal iff the diagonal values of the W' basis are independent
            QT = Q.T.copy()
            rq, _ = _nb_rref(QT, mul, add, neg, inv)
            maximal = rq == s
        else:
            maximal = s == 0
        if maximal:
            if count == out.shape[0]:
                out, odims = _nb_grow(out, odims, 2 * count)
            out[count] = B
            odims[count] = d
            count += 1
            continue
        minp = n
        for j in range(n):
            if d > 0 and B[0, j] != 0:
                minp = j
                break
        for r in range(s):
            if upiv[r] >= minp:
                break
            e = s - r - 1
            total = q**e
            work += total
            if work > budget:
                return out[:count], odims[:count], STATUS_BUDGET, work
            for c in range(e):
                combo[c] = 0
            for _ in range(total):
                for j in range(n):
                    v[j] = U[r, j]
                for c in range(e):
                    if combo[c] != 0:
                        for j in range(n):
                            if U[r + 1 + c, j] != 0:
                                v[j] = add[v[j], mul[combo[c], U[r + 1 + c, j]]]
                ok = True
                if char2:
                    for t in range(G.shape[0]):
                        qv[t] = Q[r, t]
                    for c in range(e):
                        if combo[c] != 0:
                            c2 = mul[combo[c], combo[c]]
                            for t in range(G.shape[0]):
                                qv[t] = add[qv[t], mul[c2, Q[r + 1 + c, t]]]
                    for t in range(G.shape[0]):
                        if qv[t] != 0:
                            ok = False
                            break
                if ok:
                    if top == stack.shape[0]:
                        stack, sdims = _nb_grow(stack, sdims, 2 * top)
                    child = stack[top]
                    child[:, :] = 0
                    child[0] = v
                    for i in range(d):
                        child[i + 1] = B[i]
                    sdims[top] = d + 1
                    top += 1
                # advance the base-q counter
                c = 0
                while c < e:
                    combo[c] += 1
                    if combo[c] < q:
                        break
                    combo[c] = 0
                    c += 1
    return out[:count], odims[:count], STATUS_OK, work


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _np_rref(A, T):
    A = A.copy()
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        sel = r + nz[0]
        if sel != r:
            A[[r, sel]] = A[[sel, r]]
        A[r] = T.mul[T.inv[A[r, c]], A[r]]
        f = T.neg[A[:, c]]
        f[r] = 0
        A = T.add[A, T.mul[f[:, None], A[r][None, :]]]
        piv.append(c)
        r += 1
    return A, np.array(piv, dtype=np.int64)


def _np_reduce_last(x, T):
    """Field sum along the last axis."""
    acc = np.zeros(x.shape[:-1], dtype=np.int64)
    for j in range(x.shape[-1]):
        acc = T.add[acc, x[..., j]]
    return acc


def _np_complement(B, G, T):
    d, n = B.shape
    m = G.shape[0]
    if d:
        # C[i, t, a] = sum_b G[t, a, b] * B[i, b]
        C = _np_reduce_last(T.mul[G[None, :, :, :], B[:, None, None, :]], T).reshape(d * m, n)
        units = np.zeros((d, n), dtype=np.int64)
        lead = (B != 0).argmax(axis=1)
        units[np.arange(d), lead] = 1
        C = np.vstack([C, units])
    else:
        C = np.zeros((0, n), dtype=np.int64)
    R, piv = _np_rref(C, T)
    rank = piv.size
    free = np.setdiff1d(np.arange(n), piv)
    U = np.zeros((free.size, n), dtype=np.int64)
    U[np.arange(free.size), free] = 1
    if rank:
        U[:, piv] = T.neg[R[:rank][:, free]].T
    U, upiv = _np_rref(U, T)
    return U, upiv


def _np_diag_values(U, G, T):
    # Q[r, t] = sum_{a,b} U[r,a] G[t,a,b] U[r,b]
    inner = _np_reduce_last(T.mul[G[None, :, :, :], U[:, None, None, :]], T)  # (s, m, n)
    return _np_reduce_last(T.mul[U[:, None, :], inner], T)


def _np_enumerate(G, n, T, budget):
    char2 = T.p == 2
    q = T.q
    stack = [np.zeros((0, n), dtype=np.int64)]
    found = []
    work = 0
    while stack:
        B = stack.pop()
        d = B.shape[0]
        work += 1
        if work > budget:
            return found, STATUS_BUDGET, work
        U, upiv = _np_complement(B, G, T)
        s = U.shape[0]
        Q = _np_diag_values(U, G, T)
        if char2:
            maximal = _np_rref(Q.T.copy(), T)[1].size == s
        else:
            maximal = s == 0
        if maximal:
            found.append(B)
            continue
        minp = int(np.flatnonzero(B[0])[0]) if d else n
        for r in range(s):
            if upiv[r] >= minp:
                break
            e = s - r - 1
            work += q**e
            if work > budget:
                return found, STATUS_BUDGET, work
            combos = np.array(list(product(range(q), repeat=e)), dtype=np.int64).reshape(q**e, e)
            combos = combos[:, ::-1]  # same visiting order as the numba counter
            V = np.broadcast_to(U[r], (combos.shape[0], n)).copy()
            for c in range(e):
                V = T.add[V, T.mul[combos[:, c][:, None], U[r + 1 + c][None, :]]]
            if char2:
                qv = np.broadcast_to(Q[r], (combos.shape[0], Q.shape[1])).copy()
                sq = T.mul[combos, combos]
                for c in range(e):
                    qv = T.add[qv, T.mul[sq[:, c][:, None], Q[r + 1 + c][None, :]]]
                V = V[~qv.any(axis=1)] if qv.shape[1] else V
            for v in V:
                stack.append(np.vstack([v[None, :], B]))
    return found, STATUS_OK, work


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def enumerate_maximal(G: np.ndarray, n: int, tables, budget: int, backend: str | None = None):
    """All maximal isotropic subspaces of the map with Gram tensor ``G``.

    ``G`` is an int64 array of shape ``(m, n, n)`` holding encoded field
    elements.  Returns a list of RREF basis arrays (shape ``(d, n)``) in
    search order.  Raises :class:`BudgetExceeded` when the search would
    examine more than ``budget`` candidates.
    """
    backend = backend or default_backend()
    G = np.ascontiguousarray(G, dtype=np.int64)
    G = G.reshape(G.shape[0] if G.ndim == 3 else 0, n, n)
    T = tables
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        outB, outD, status, work = _nb_enumerate(
            G, n, T.q, T.p == 2, T.mul, T.add, T.neg, T.inv, budget)
        found = [outB[i, : outD[i]].copy() for i in range(outB.shape[0])]
    elif backend == "numpy":
        found, status, work = _np_enumerate(G, n, T, budget)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if status == STATUS_BUDGET:
        raise BudgetExceeded(work, budget)
    return found
