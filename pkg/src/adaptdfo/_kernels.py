"""Inner loops of the geometry routines, in numba and pure-numpy flavours.

Both flavours share signatures and are interchangeable.  The numba path is
used when numba imports and ``ADAPTDFO_DISABLE_NUMBA`` is unset (or "0");
setting the variable forces the numpy path, which is what the benchmark in
``benchmarks/bench_kernels.py`` toggles.

All kernels work in scaled coordinates: the sampling ball is the unit ball
centred at the origin.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None


def _numba_requested():
    return os.environ.get("ADAPTDFO_DISABLE_NUMBA", "") in ("", "0")


USING_NUMBA = numba is not None and _numba_requested()

# status codes returned by newton_pivot
PIVOT_OK = 0
PIVOT_DEGENERATE = 1

# pivots smaller than this are treated as a singular Newton basis
_TINY_PIVOT = 1e-12


# --------------------------------------------------------------------------
# numpy implementations


def basis_matrix_numpy(Z, ncols):
    """Rows of the natural quadratic basis evaluated at the rows of ``Z``.

    Only the first ``ncols`` basis functions are produced, in the order
    ``1, z_1..z_n, z_1^2/2, z_1 z_2, .., z_1 z_n, z_2^2/2, .., z_n^2/2``.
    """
    m, n = Z.shape
    out = np.empty((m, ncols))
    out[:, 0] = 1.0
    k = min(ncols, n + 1)
    out[:, 1:k] = Z[:, : k - 1]
    if ncols > n + 1:
        rows, cols = np.triu_indices(n)
        nq = ncols - n - 1
        rows, cols = rows[:nq], cols[:nq]
        weight = np.where(rows == cols, 0.5, 1.0)
        out[:, n + 1 :] = Z[:, rows] * Z[:, cols] * weight
    return out


def newton_pivot_numpy(Zs, Zc, ncols, threshold):
    """Pick ``ncols`` points by pivoting on Newton fundamental polynomials.

    Row 0 of ``Zs`` (the centre) is always taken first.  For every later
    basis polynomial the unused seed row with the largest absolute value is
    accepted if that value reaches ``threshold``; otherwise a new point is
    generated: the exact maximiser over the unit ball for linear polynomials,
    the best row of ``Zc`` for quadratic ones.

    Returns ``(points, source, status)`` where ``source[i]`` is the seed row
    used for point ``i`` or -1 for a generated point.
    """
    s, n = Zs.shape
    Ps = basis_matrix_numpy(Zs, ncols)
    # candidate values are formed on demand as Bc @ U, they are rarely needed
    Bc = basis_matrix_numpy(Zc, ncols)
    U = np.eye(ncols)
    used = np.zeros(s, dtype=bool)
    points = np.empty((ncols, n))
    source = np.full(ncols, -1, dtype=np.int64)

    for i in range(ncols):
        if i == 0:
            w = Ps[0].copy()
            points[0] = Zs[0]
            source[0] = 0
            used[0] = True
        else:
            vals = np.abs(Ps[:, i])
            vals[used] = -1.0
            j = int(np.argmax(vals)) if s else 0
            if s and vals[j] >= threshold:
                w = Ps[j].copy()
                points[i] = Zs[j]
                source[i] = j
                used[j] = True
            elif i <= n:
                b = U[1 : n + 1, i]
                z = b / np.linalg.norm(b)
                w = basis_matrix_numpy(z[None, :], ncols)[0] @ U
                points[i] = z
            else:
                jc = int(np.argmax(np.abs(Bc @ U[:, i])))
                w = Bc[jc] @ U
                points[i] = Zc[jc]
        piv = w[i]
        if abs(piv) < _TINY_PIVOT:
            return points, source, PIVOT_DEGENERATE
        U[:, i] /= piv
        Ps[:, i] /= piv
        if i + 1 < ncols:
            rest = w[i + 1 :]
            U[:, i + 1 :] -= np.outer(U[:, i], rest)
            Ps[:, i + 1 :] -= np.outer(Ps[:, i], rest)
    return points, source, PIVOT_OK


def greedy_replace_numpy(V, Z, Zc, lam, max_rounds):
    """Swap set points for candidates until every Lagrange value is <= lam.

    ``V`` holds the Lagrange polynomials of the set ``Z`` evaluated at the
    candidates ``Zc`` (one column per set point) and is updated in place,
    as is ``Z``.  Point 0 is never replaced.  Returns the number of swaps.
    """
    C, q = V.shape
    rounds = 0
    while rounds < max_rounds:
        A = np.abs(V[:, 1:])
        flat = int(np.argmax(A))
        c, i = divmod(flat, q - 1)
        i += 1
        best = A[c, i - 1]
        if best <= lam and np.abs(V[:, 0]).max() <= lam:
            break
        if best <= 1.0:
            # no swap can grow the determinant any further
            break
        w = V[c].copy()
        V[:, i] /= w[i]
        w[i] = 0.0
        V -= np.outer(V[:, i], w)
        Z[i] = Zc[c]
        rounds += 1
    return rounds


# --------------------------------------------------------------------------
# numba implementations (explicit loops, no temporaries in the hot path)

if numba is not None:

    @numba.njit(cache=True)
    def basis_matrix_numba(Z, ncols):
        m, n = Z.shape
        out = np.empty((m, ncols))
        for r in range(m):
            out[r, 0] = 1.0
            col = 1
            for a in range(n):
                if col >= ncols:
                    break
                out[r, col] = Z[r, a]
                col += 1
            for a in range(n):
                for b in range(a, n):
                    if col >= ncols:
                        break
                    if a == b:
                        out[r, col] = 0.5 * Z[r, a] * Z[r, a]
                    else:
                        out[r, col] = Z[r, a] * Z[r, b]
                    col += 1
        return out

    @numba.njit(cache=True)
    def _eliminate(M, i, w):
        # M[:, i] /= w[i]; then zero the later columns at the chosen point
        rows, cols = M.shape
        piv = w[i]
        for r in range(rows):
            mi = M[r, i] / piv
            M[r, i] = mi
            if mi != 0.0:
                for j in range(i + 1, cols):
                    M[r, j] -= mi * w[j]

    @numba.njit(cache=True)
    def newton_pivot_numba(Zs, Zc, ncols, threshold):
        s, n = Zs.shape
        Ps = basis_matrix_numba(Zs, ncols)
        Bc = basis_matrix_numba(Zc, ncols)
        U = np.eye(ncols)
        used = np.zeros(s, dtype=np.bool_)
        points = np.empty((ncols, n))
        source = np.full(ncols, -1, dtype=np.int64)
        w = np.empty(ncols)
        z = np.empty((1, n))

        for i in range(ncols):
            if i == 0:
                w[:] = Ps[0]
                points[0] = Zs[0]
                source[0] = 0
                used[0] = True
            else:
                j = -1
                best = -1.0
                for r in range(s):
                    if not used[r]:
                        v = abs(Ps[r, i])
                        if v > best:
                            best = v
                            j = r
                if j >= 0 and best >= threshold:
                    w[:] = Ps[j]
                    points[i] = Zs[j]
                    source[i] = j
                    used[j] = True
                elif i <= n:
                    nb = 0.0
                    for a in range(n):
                        nb += U[1 + a, i] * U[1 + a, i]
                    nb = np.sqrt(nb)
                    for a in range(n):
                        z[0, a] = U[1 + a, i] / nb
                    phi = basis_matrix_numba(z, ncols)
                    for c in range(ncols):
                        acc = 0.0
                        for r in range(ncols):
                            acc += phi[0, r] * U[r, c]
                        w[c] = acc
                    points[i] = z[0]
                else:
                    jc = 0
                    best = -1.0
                    for r in range(Bc.shape[0]):
                        acc = 0.0
                        for c in range(ncols):
                            acc += Bc[r, c] * U[c, i]
                        v = abs(acc)
                        if v > best:
                            best = v
                            jc = r
                    for c in range(ncols):
                        acc = 0.0
                        for r in range(ncols):
                            acc += Bc[jc, r] * U[r, c]
                        w[c] = acc
                    points[i] = Zc[jc]
            if abs(w[i]) < _TINY_PIVOT:
                return points, source, PIVOT_DEGENERATE
            _eliminate(U, i, w)
            _eliminate(Ps, i, w)
        return points, source, PIVOT_OK

    @numba.njit(cache=True)
    def greedy_replace_numba(V, Z, Zc, lam, max_rounds):
        C, q = V.shape
        w = np.empty(q)
        rounds = 0
        while rounds < max_rounds:
            best = -1.0
            bc = 0
            bi = 1
            worst0 = 0.0
            for c in range(C):
                v0 = abs(V[c, 0])
                if v0 > worst0:
                    worst0 = v0
                for i in range(1, q):
                    v = abs(V[c, i])
                    if v > best:
                        best = v
                        bc = c
                        bi = i
            if best <= lam and worst0 <= lam:
                break
            if best <= 1.0:
                break
            for j in range(q):
                w[j] = V[bc, j]
            piv = w[bi]
            for c in range(C):
                V[c, bi] /= piv
            for c in range(C):
                vi = V[c, bi]
                for j in range(q):
                    if j != bi:
                        V[c, j] -= vi * w[j]
            for a in range(Z.shape[1]):
                Z[bi, a] = Zc[bc, a]
            rounds += 1
        return rounds


if USING_NUMBA:
    basis_matrix = basis_matrix_numba
    newton_pivot = newton_pivot_numba
    greedy_replace = greedy_replace_numba
else:
    basis_matrix = basis_matrix_numpy
    newton_pivot = newton_pivot_numpy
    greedy_replace = greedy_replace_numpy


def backend():
    """Name of the active kernel flavour."""
    return "numba" if USING_NUMBA else "numpy"
