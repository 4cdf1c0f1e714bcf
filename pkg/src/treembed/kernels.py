"""Pair-scanning kernels.

Each kernel has a numba implementation (``*_numba``) and a vectorised numpy
implementation (``*_numpy``); the public name dispatches on
``_accel.USE_NUMBA``.  Both paths perform the same floating-point operations
in the same order wherever that is practical, so results agree bit-for-bit
except for the lp sums, which agree to rounding.

Profile arrays used below: ``colors[v, i]`` is the i-th colour class met on
the root--v path (``-1`` past the end) and ``lengths[v, i]`` the weight that
class contributes to that path (``0`` past the end).
"""
import numpy as np

from . import _accel
from ._accel import njit


# ---------------------------------------------------------------------------
# tree distances
# ---------------------------------------------------------------------------

@njit
def _tree_distance_matrix_numba(parent, weight, depth, tin, tout):
    n = parent.shape[0]
    out = np.zeros((n, n))
    path = np.empty(n, dtype=np.int64)
    for x in range(n):
        for y in range(x + 1, n):
            a = x
            b = y
            while depth[a] > depth[b]:
                a = parent[a]
            while depth[b] > depth[a]:
                b = parent[b]
            while a != b:
                a = parent[a]
                b = parent[b]
            top = a
            total = 0.0
            for v0 in (x, y):
                k = 0
                v = v0
                while v != top:
                    path[k] = v
                    k += 1
                    v = parent[v]
                s = 0.0
                for t in range(k - 1, -1, -1):
                    s = s + weight[path[t]]
                if v0 == x:
                    total = s
                else:
                    total = total + s
            out[x, y] = total
            out[y, x] = total
    return out


def _tree_distance_matrix_numpy(parent, weight, depth, tin, tout):
    n = parent.shape[0]
    at = np.argsort(tin)  # vertex sitting at each preorder position
    # up[t, s]: weight of the path from preorder vertex s down to t, summed
    # from s downward; only meaningful when s is an ancestor of t
    up = np.zeros((n, n))
    for t in range(1, n):
        v = at[t]
        up[t] = up[tin[parent[v]]] + weight[v]
        up[t, t] = 0.0
    kids = [[] for _ in range(n)]
    for v in range(n):
        if parent[v] >= 0:
            kids[parent[v]].append(v)
    d = np.zeros((n, n))
    for a in range(n):
        if not kids[a]:
            continue
        lo, hi = tin[a], tout[a]
        label = np.full(hi - lo, -1, dtype=np.int64)
        for c in kids[a]:
            label[tin[c] - lo:tout[c] - lo] = c
        col = up[lo:hi, lo]
        mask = label[:, None] != label[None, :]
        block = d[lo:hi, lo:hi]
        vals = col[:, None] + col[None, :]
        block[mask] = vals[mask]
    return d[np.ix_(tin, tin)]


def tree_distance_matrix(parent, weight, depth, tin, tout):
    fn = _tree_distance_matrix_numba if _accel.USE_NUMBA else _tree_distance_matrix_numpy
    return fn(parent, weight, depth, tin, tout)


# ---------------------------------------------------------------------------
# metric axioms
# ---------------------------------------------------------------------------

@njit
def _triangle_violation_numba(d, tol):
    n = d.shape[0]
    for j in range(n):
        for i in range(n):
            dij = d[i, j]
            for k in range(n):
                if d[i, k] > dij + d[j, k] + tol:
                    return i, j, k
    return -1, -1, -1


def _triangle_violation_numpy(d, tol):
    for j in range(d.shape[0]):
        bad = d > d[:, j, None] + d[None, j, :] + tol
        if bad.any():
            i, k = np.argwhere(bad)[0]
            return int(i), j, int(k)
    return -1, -1, -1


def triangle_violation(d, tol):
    """First triple (i, j, k) with d[i,k] > d[i,j] + d[j,k] + tol, or None."""
    fn = _triangle_violation_numba if _accel.USE_NUMBA else _triangle_violation_numpy
    i, j, k = fn(np.ascontiguousarray(d, dtype=np.float64), float(tol))
    return None if i < 0 else (int(i), int(j), int(k))


# ---------------------------------------------------------------------------
# extremal ratios
# ---------------------------------------------------------------------------

@njit
def _max_ratio_numba(num, den):
    n = num.shape[0]
    best = -1.0
    bi = -1
    bj = -1
    for i in range(n):
        for j in range(i + 1, n):
            r = num[i, j] / den[i, j]
            if r > best:
                best = r
                bi = i
                bj = j
    return best, bi, bj


def _max_ratio_numpy(num, den):
    n = num.shape[0]
    if n < 2:
        return -1.0, -1, -1
    iu, ju = np.triu_indices(n, 1)
    r = num[iu, ju] / den[iu, ju]
    k = int(np.argmax(r))
    return float(r[k]), int(iu[k]), int(ju[k])


def max_ratio(num, den):
    """max over i<j of num[i,j]/den[i,j] with the first maximising pair."""
    fn = _max_ratio_numba if _accel.USE_NUMBA else _max_ratio_numpy
    best, i, j = fn(np.ascontiguousarray(num, dtype=np.float64), np.ascontiguousarray(den, dtype=np.float64))
    return float(best), int(i), int(j)


# ---------------------------------------------------------------------------
# lp distances between profile-aligned sparse vectors
# ---------------------------------------------------------------------------

@njit
def _lp_pairwise_numba(colors, values, p):
    # Rows share colours up to the first index where the colours differ and
    # none after it, so everything from there on is a suffix sum of |v|**p.
    n, K = colors.shape
    vp = np.abs(values) ** p
    tail = np.zeros((n, K + 1))
    for x in range(n):
        for i in range(K - 1, -1, -1):
            tail[x, i] = tail[x, i + 1] + vp[x, i]
    out = np.zeros((n, n))
    for x in range(n):
        for y in range(x + 1, n):
            s = 0.0
            j = 0
            while j < K and colors[x, j] == colors[y, j]:
                s += abs(values[x, j] - values[y, j]) ** p
                j += 1
            s += tail[x, j] + tail[y, j]
            r = s ** (1.0 / p)
            out[x, y] = r
            out[y, x] = r
    return out


def _lp_pairwise_numpy(colors, values, p):
    n, K = colors.shape
    out = np.zeros((n, n))
    vp = np.abs(values) ** p
    for x in range(n - 1):
        c, v = colors[x + 1:], values[x + 1:]
        same = c == colors[x]
        terms = np.where(same, np.abs(values[x] - v) ** p, vp[x] + vp[x + 1:])
        s = np.zeros(n - x - 1)
        for i in range(K):
            s += terms[:, i]
        out[x, x + 1:] = s ** (1.0 / p)
    return out + out.T


def lp_pairwise(colors, values, p):
    """Pairwise lp distances between profile-aligned sparse vectors.

    Coordinates sharing a colour share a column index, and two rows share no
    colour after the first index where they differ (true of every embedding
    built from a monotone colouring).
    """
    fn = _lp_pairwise_numba if _accel.USE_NUMBA else _lp_pairwise_numpy
    return fn(np.ascontiguousarray(colors, dtype=np.int64), np.ascontiguousarray(values, dtype=np.float64), float(p))


# ---------------------------------------------------------------------------
# strong colourings
# ---------------------------------------------------------------------------

@njit
def _insertion_sort(a, cnt):
    for i in range(1, cnt):
        v = a[i]
        k = i - 1
        while k >= 0 and a[k] > v:
            a[k + 1] = a[k]
            k -= 1
        a[k + 1] = v


@njit
def _pair_contributions(colors, lengths, x, y, buf):
    K = colors.shape[1]
    j = 0
    while j < K and colors[x, j] == colors[y, j] and lengths[x, j] == lengths[y, j]:
        j += 1
    cnt = 0
    if j == K:
        return cnt
    if colors[x, j] == colors[y, j]:
        buf[cnt] = abs(lengths[x, j] - lengths[y, j])
        cnt += 1
    else:
        if lengths[x, j] > 0:
            buf[cnt] = lengths[x, j]
            cnt += 1
        if lengths[y, j] > 0:
            buf[cnt] = lengths[y, j]
            cnt += 1
    for i in range(j + 1, K):
        if lengths[x, i] > 0:
            buf[cnt] = lengths[x, i]
            cnt += 1
        if lengths[y, i] > 0:
            buf[cnt] = lengths[y, i]
            cnt += 1
    return cnt


@njit
def _best_delta_numba(colors, lengths, rho):
    n, K = colors.shape
    buf = np.zeros(2 * K + 1)
    best = 2.0
    bx = -1
    by = -1
    for x in range(n):
        for y in range(x + 1, n):
            cnt = _pair_contributions(colors, lengths, x, y, buf)
            _insertion_sort(buf, cnt)
            s = buf
            half = 0.5 * rho[x, y]
            acc = 0.0
            delta = 0.0
            for k in range(cnt - 1, -1, -1):
                acc += s[k]
                if acc >= half:
                    delta = s[k] / rho[x, y]
                    break
            if delta < best:
                best = delta
                bx = x
                by = y
    return best, bx, by


@njit
def _verify_strong_numba(colors, lengths, rho, delta):
    n, K = colors.shape
    buf = np.zeros(2 * K + 1)
    for x in range(n):
        for y in range(x + 1, n):
            cnt = _pair_contributions(colors, lengths, x, y, buf)
            _insertion_sort(buf, cnt)
            s = buf
            r = rho[x, y]
            acc = 0.0
            for k in range(cnt - 1, -1, -1):
                if s[k] / r < delta:
                    break
                acc += s[k]
            if not acc >= 0.5 * r:
                return x, y
    return -1, -1


def _contributions_numpy(colors, lengths, x):
    """Sorted (descending) class contributions for pairs (x, y), y > x."""
    K = colors.shape[1]
    c, L = colors[x + 1:], lengths[x + 1:]
    diff = (c != colors[x]) | (L != lengths[x])
    j = np.argmax(diff, axis=1)
    idx = np.arange(K)[None, :]
    after = idx > j[:, None]
    at = idx == j[:, None]
    same_class = c == colors[x]
    lx = np.broadcast_to(lengths[x], L.shape)
    xpart = np.where(after, lx, 0.0)
    xpart = np.where(at & same_class, np.abs(lx - L), xpart)
    xpart = np.where(at & ~same_class, lx, xpart)
    ypart = np.where(after | (at & ~same_class), L, 0.0)
    contrib = np.concatenate([xpart, ypart], axis=1)
    return -np.sort(-contrib, axis=1)


def _best_delta_numpy(colors, lengths, rho):
    n = colors.shape[0]
    best, bx, by = 2.0, -1, -1
    for x in range(n - 1):
        s = _contributions_numpy(colors, lengths, x)
        r = rho[x, x + 1:]
        acc = np.cumsum(s, axis=1)
        k = np.argmax(acc >= (0.5 * r)[:, None], axis=1)
        delta = s[np.arange(s.shape[0]), k] / r
        i = int(np.argmin(delta))
        if delta[i] < best:
            best, bx, by = float(delta[i]), x, x + 1 + i
    return best, bx, by


def _verify_strong_numpy(colors, lengths, rho, delta):
    n = colors.shape[0]
    for x in range(n - 1):
        s = _contributions_numpy(colors, lengths, x)
        r = rho[x, x + 1:]
        keep = np.where(s / r[:, None] >= delta, s, 0.0)
        acc = np.zeros(s.shape[0])
        for k in range(s.shape[1]):
            acc += keep[:, k]
        bad = ~(acc >= 0.5 * r)
        if bad.any():
            return x, x + 1 + int(np.argmax(bad))
    return -1, -1


def best_delta(colors, lengths, rho):
    """Minimum over pairs of the largest delta each pair tolerates, with witness."""
    fn = _best_delta_numba if _accel.USE_NUMBA else _best_delta_numpy
    best, x, y = fn(np.ascontiguousarray(colors, dtype=np.int64),
                    np.ascontiguousarray(lengths, dtype=np.float64),
                    np.ascontiguousarray(rho, dtype=np.float64))
    return float(best), int(x), int(y)


def verify_strong(colors, lengths, rho, delta):
    """First pair violating the delta-strong inequality, or None."""
    fn = _verify_strong_numba if _accel.USE_NUMBA else _verify_strong_numpy
    x, y = fn(np.ascontiguousarray(colors, dtype=np.int64),
              np.ascontiguousarray(lengths, dtype=np.float64),
              np.ascontiguousarray(rho, dtype=np.float64), float(delta))
    return None if x < 0 else (int(x), int(y))
