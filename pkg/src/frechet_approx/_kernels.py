"""Compiled inner loops.

Everything here works on raw float64 arrays; the public modules wrap these
with validation and friendlier return types.  Empty intervals are encoded as
``lo > hi`` (we use the pair ``(2.0, -1.0)``).
"""

import math

import numpy as np
from numba import njit

# Relative slack for clamping slightly negative discriminants (times scale**2).
DISC_SLACK = 1e-12
# Parameter-space slack used when propagating reachability across a cell.
PARAM_SLACK = 1e-10

EMPTY_LO = 2.0
EMPTY_HI = -1.0


@njit(cache=True)
def foot_and_height2(p, a, b):
    """Unclamped foot parameter of p on line ab, squared height, |b-a|^2."""
    d = p.shape[0]
    vv = 0.0
    wv = 0.0
    for k in range(d):
        v = b[k] - a[k]
        w = a[k] - p[k]
        vv += v * v
        wv += w * v
    if vv == 0.0:
        h2 = 0.0
        for k in range(d):
            w = a[k] - p[k]
            h2 += w * w
        return 0.0, h2, vv
    t0 = -wv / vv
    h2 = 0.0
    for k in range(d):
        f = a[k] + t0 * (b[k] - a[k]) - p[k]
        h2 += f * f
    return t0, h2, vv


@njit(cache=True)
def dist2(p, q):
    s = 0.0
    for k in range(p.shape[0]):
        w = p[k] - q[k]
        s += w * w
    return s


@njit(cache=True)
def coord_scale(p, a, b):
    s = 0.0
    for k in range(p.shape[0]):
        s = max(s, abs(p[k]), abs(a[k]), abs(b[k]))
    return s


@njit(cache=True)
def fs_interval(p, a, b, delta):
    """Closed interval {t in [0,1] : |a + t(b-a) - p| <= delta}."""
    t0, h2, vv = foot_and_height2(p, a, b)
    scale = coord_scale(p, a, b)
    tol = DISC_SLACK * scale * scale
    d2 = delta * delta
    lo = EMPTY_LO
    hi = EMPTY_HI
    disc = d2 - h2
    if disc >= -tol and vv > 0.0:
        if disc < 0.0:
            disc = 0.0
        half = math.sqrt(disc / vv)
        lo = max(t0 - half, 0.0)
        hi = min(t0 + half, 1.0)
        if lo > hi:
            lo = EMPTY_LO
            hi = EMPTY_HI
    # Endpoint snapping keeps tangencies at the vertices exact.
    if dist2(p, a) - d2 <= tol:
        lo = 0.0
        if hi < 0.0:
            hi = 0.0
    if dist2(p, b) - d2 <= tol:
        hi = 1.0
        if lo > 1.0:
            lo = 1.0
    return lo, hi


@njit(cache=True)
def point_segment_distance(p, a, b):
    t0, h2, vv = foot_and_height2(p, a, b)
    if vv == 0.0 or t0 <= 0.0:
        return math.sqrt(dist2(p, a))
    if t0 >= 1.0:
        return math.sqrt(dist2(p, b))
    return math.sqrt(h2)


@njit(cache=True)
def _propagate(free_lo, free_hi, side_lo, side_hi, other_lo, other_hi):
    """Reach interval on an outgoing boundary.

    ``side`` is the incoming boundary opposite in orientation (any point of
    it reaches the whole outgoing boundary), ``other`` is the incoming
    boundary parallel to the outgoing one (only points beyond its leftmost
    reachable coordinate are reachable).
    """
    if free_lo > free_hi:
        return EMPTY_LO, EMPTY_HI
    if side_lo <= side_hi:
        return free_lo, free_hi
    if other_lo <= other_hi:
        lo = max(free_lo, other_lo)
        if lo <= free_hi:
            return lo, free_hi
        if lo - free_hi <= PARAM_SLACK:
            return free_hi, free_hi
    return EMPTY_LO, EMPTY_HI


@njit(cache=True)
def bfs_decide(A, B, delta, record):
    """BFS over the reachable free-space cells.

    Returns (count, end_reachable, idx, reach) where idx[k] = (i, j) and
    reach[k] = (top_lo, top_hi, right_lo, right_hi) for each visited cell
    (only filled when ``record`` is true).
    """
    na = A.shape[0] - 1
    nb = B.shape[0] - 1
    cap = 64 if record else 1
    idx = np.empty((cap, 2), dtype=np.int64)
    reach = np.empty((cap, 4), dtype=np.float64)
    if na < 1 or nb < 1:
        return 0, False, idx[:0], reach[:0]
    scale0 = coord_scale(A[0], B[0], B[0])
    if dist2(A[0], B[0]) - delta * delta > DISC_SLACK * scale0 * scale0:
        return 0, False, idx[:0], reach[:0]

    qcap = 4 * (min(na, nb) + 2) + 8
    qi = np.empty(qcap, dtype=np.int64)
    qj = np.empty(qcap, dtype=np.int64)
    qkind = np.empty(qcap, dtype=np.int64)
    qlo = np.empty(qcap, dtype=np.float64)
    qhi = np.empty(qcap, dtype=np.float64)
    head = 0
    size = 1
    qi[0] = 0
    qj[0] = 0
    qkind[0] = 2
    qlo[0] = 0.0
    qhi[0] = 0.0

    count = 0
    end = False
    while size > 0:
        i = qi[head]
        j = qj[head]
        left_lo = EMPTY_LO
        left_hi = EMPTY_HI
        bot_lo = EMPTY_LO
        bot_hi = EMPTY_HI
        # Merge all consecutive entries for this cell.
        while size > 0 and qi[head] == i and qj[head] == j:
            kind = qkind[head]
            if kind == 0:
                left_lo = qlo[head]
                left_hi = qhi[head]
            elif kind == 1:
                bot_lo = qlo[head]
                bot_hi = qhi[head]
            else:
                left_lo = 0.0
                left_hi = 0.0
                bot_lo = 0.0
                bot_hi = 0.0
            head += 1
            if head == qcap:
                head = 0
            size -= 1

        ft_lo, ft_hi = fs_interval(B[j + 1], A[i], A[i + 1], delta)
        fr_lo, fr_hi = fs_interval(A[i + 1], B[j], B[j + 1], delta)
        rt_lo, rt_hi = _propagate(ft_lo, ft_hi, left_lo, left_hi, bot_lo, bot_hi)
        rr_lo, rr_hi = _propagate(fr_lo, fr_hi, bot_lo, bot_hi, left_lo, left_hi)

        if record:
            if count == idx.shape[0]:
                nidx = np.empty((2 * count, 2), dtype=np.int64)
                nreach = np.empty((2 * count, 4), dtype=np.float64)
                nidx[:count] = idx
                nreach[:count] = reach
                idx = nidx
                reach = nreach
            idx[count, 0] = i
            idx[count, 1] = j
            reach[count, 0] = rt_lo
            reach[count, 1] = rt_hi
            reach[count, 2] = rr_lo
            reach[count, 3] = rr_hi
        count += 1

        if i == na - 1 and j == nb - 1:
            if (rt_lo <= rt_hi and rt_hi >= 1.0) or (rr_lo <= rr_hi and rr_hi >= 1.0):
                end = True
        if rt_lo <= rt_hi and j + 1 < nb:
            tail = head + size
            if tail >= qcap:
                tail -= qcap
            qi[tail] = i
            qj[tail] = j + 1
            qkind[tail] = 1
            qlo[tail] = rt_lo
            qhi[tail] = rt_hi
            size += 1
        if rr_lo <= rr_hi and i + 1 < na:
            tail = head + size
            if tail >= qcap:
                tail -= qcap
            qi[tail] = i + 1
            qj[tail] = j
            qkind[tail] = 0
            qlo[tail] = rr_lo
            qhi[tail] = rr_hi
            size += 1
    if record:
        return count, end, idx[:count].copy(), reach[:count].copy()
    return count, end, idx[:0], reach[:0]


@njit(cache=True)
def _find(keys, order, key):
    lo = 0
    hi = order.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[order[mid]] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < order.shape[0] and keys[order[lo]] == key:
        return order[lo]
    return -1


@njit(cache=True)
def trace_back(idx, reach, na, nb):
    """Backward walk from the end corner through recorded reach intervals.

    Returns the visited breakpoints (s, t) from the end to the start, or
    empty arrays when the record is inconsistent.
    """
    keys = idx[:, 0] * nb + idx[:, 1]
    order = np.argsort(keys)
    s = np.empty(na + nb + 2)
    t = np.empty(na + nb + 2)
    s[0] = na
    t[0] = nb
    m = 1
    i = na - 1
    j = nb - 1
    x = 1.0
    y = 1.0
    while True:
        if i == 0 and j == 0:
            s[m] = 0.0
            t[m] = 0.0
            m += 1
            break
        has_left = False
        l_lo = 0.0
        l_hi = 0.0
        if i > 0:
            k = _find(keys, order, (i - 1) * nb + j)
            if k >= 0 and reach[k, 2] <= reach[k, 3]:
                has_left = True
                l_lo = reach[k, 2]
                l_hi = reach[k, 3]
        has_bot = False
        b_lo = 0.0
        b_hi = 0.0
        if j > 0:
            k = _find(keys, order, i * nb + j - 1)
            if k >= 0 and reach[k, 0] <= reach[k, 1]:
                has_bot = True
                b_lo = reach[k, 0]
                b_hi = reach[k, 1]
        # Prefer the boundary that admits the exit point from anywhere on it.
        if y >= 1.0 and has_left:
            use_left = True
        elif x >= 1.0 and has_bot:
            use_left = False
        else:
            use_left = has_left
        if use_left:
            if not has_left:
                return s[:0], t[:0]
            ey = l_hi if y >= 1.0 else min(max(y, l_lo), l_hi)
            ey = min(ey, y)
            i -= 1
            x = 1.0
            y = ey
        else:
            if not has_bot:
                return s[:0], t[:0]
            ex = b_hi if x >= 1.0 else min(max(x, b_lo), b_hi)
            ex = min(ex, x)
            j -= 1
            x = ex
            y = 1.0
        s[m] = i + x
        t[m] = j + y
        m += 1
    return s[:m].copy(), t[:m].copy()


@njit(cache=True)
def grid_decide(A, B, delta):
    """Full-grid reachability table over every cell, no pruning.

    Used as the quadratic baseline and as an independent check of the BFS.
    Returns (end_reachable, reachable_cell_count).
    """
    na = A.shape[0] - 1
    nb = B.shape[0] - 1
    scale0 = coord_scale(A[0], B[0], B[0])
    if dist2(A[0], B[0]) - delta * delta > DISC_SLACK * scale0 * scale0:
        return False, 0
    # right reach of the previous column, per row j
    prev_lo = np.full(nb, EMPTY_LO)
    prev_hi = np.full(nb, EMPTY_HI)
    cur_lo = np.empty(nb)
    cur_hi = np.empty(nb)
    touched = 0
    end = False
    for i in range(na):
        top_lo = EMPTY_LO
        top_hi = EMPTY_HI
        for j in range(nb):
            left_lo = prev_lo[j]
            left_hi = prev_hi[j]
            bot_lo = top_lo
            bot_hi = top_hi
            if i == 0 and j == 0:
                left_lo = 0.0
                left_hi = 0.0
                bot_lo = 0.0
                bot_hi = 0.0
            # Every cell's boundary intervals are computed, reachable or not.
            ft_lo, ft_hi = fs_interval(B[j + 1], A[i], A[i + 1], delta)
            fr_lo, fr_hi = fs_interval(A[i + 1], B[j], B[j + 1], delta)
            if left_lo > left_hi and bot_lo > bot_hi:
                top_lo = EMPTY_LO
                top_hi = EMPTY_HI
                cur_lo[j] = EMPTY_LO
                cur_hi[j] = EMPTY_HI
                continue
            touched += 1
            top_lo, top_hi = _propagate(ft_lo, ft_hi, left_lo, left_hi, bot_lo, bot_hi)
            r_lo, r_hi = _propagate(fr_lo, fr_hi, bot_lo, bot_hi, left_lo, left_hi)
            cur_lo[j] = r_lo
            cur_hi[j] = r_hi
            if i == na - 1 and j == nb - 1:
                end = (top_lo <= top_hi and top_hi >= 1.0) or (r_lo <= r_hi and r_hi >= 1.0)
        prev_lo, cur_lo = cur_lo, prev_lo
        prev_hi, cur_hi = cur_hi, prev_hi
    return end, touched


@njit(cache=True)
def greedy_simplify(V, mu):
    """Indices kept by the greedy scan (first vertex at distance >= mu)."""
    n = V.shape[0]
    keep = np.empty(n, dtype=np.int64)
    keep[0] = 0
    m = 1
    cur = 0
    for i in range(1, n):
        if math.sqrt(dist2(V[i], V[cur])) >= mu:
            keep[m] = i
            m += 1
            cur = i
    if keep[m - 1] != n - 1:
        keep[m] = n - 1
        m += 1
    return keep[:m].copy()


@njit(cache=True)
def _box_distance(lo1, hi1, lo2, hi2):
    s = 0.0
    for k in range(lo1.shape[0]):
        gap = max(lo1[k] - hi2[k], lo2[k] - hi1[k], 0.0)
        s += gap * gap
    return math.sqrt(s)


@njit(cache=True)
def _diag(lo, hi):
    s = 0.0
    for k in range(lo.shape[0]):
        w = hi[k] - lo[k]
        s += w * w
    return math.sqrt(s)


@njit(cache=True)
def fair_split_tree(P):
    """Fair split tree over distinct points.

    Returns (perm, start, stop, left, right, box_lo, box_hi); node 0 is the
    root, leaves have left == -1 and hold exactly one point.
    """
    n, d = P.shape
    perm = np.arange(n)
    cap = 2 * n
    start = np.empty(cap, dtype=np.int64)
    stop = np.empty(cap, dtype=np.int64)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    box_lo = np.empty((cap, d))
    box_hi = np.empty((cap, d))
    start[0] = 0
    stop[0] = n
    nodes = 1
    stack = np.empty(cap, dtype=np.int64)
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        u = stack[top]
        s0 = start[u]
        s1 = stop[u]
        for k in range(d):
            box_lo[u, k] = P[perm[s0], k]
            box_hi[u, k] = P[perm[s0], k]
        for r in range(s0 + 1, s1):
            for k in range(d):
                x = P[perm[r], k]
                if x < box_lo[u, k]:
                    box_lo[u, k] = x
                if x > box_hi[u, k]:
                    box_hi[u, k] = x
        if s1 - s0 == 1:
            continue
        axis = 0
        for k in range(1, d):
            if box_hi[u, k] - box_lo[u, k] > box_hi[u, axis] - box_lo[u, axis]:
                axis = k
        mid = 0.5 * (box_lo[u, axis] + box_hi[u, axis])
        a = s0
        b = s1 - 1
        while a <= b:
            if P[perm[a], axis] < mid:
                a += 1
            else:
                tmp = perm[a]
                perm[a] = perm[b]
                perm[b] = tmp
                b -= 1
        cut = a
        if cut == s0 or cut == s1:
            # Rounding collapsed the midpoint onto an extreme; split by rank.
            order = np.argsort(P[perm[s0:s1], axis], kind="mergesort")
            perm[s0:s1] = perm[s0:s1][order]
            cut = s0 + (s1 - s0) // 2
        lc = nodes
        rc = nodes + 1
        nodes += 2
        start[lc] = s0
        stop[lc] = cut
        start[rc] = cut
        stop[rc] = s1
        left[u] = lc
        right[u] = rc
        stack[top] = lc
        stack[top + 1] = rc
        top += 2
    return perm, start[:nodes], stop[:nodes], left[:nodes], right[:nodes], box_lo[:nodes], box_hi[:nodes]


@njit(cache=True)
def _merge_ranges(lo, hi):
    """Union of closed ranges [lo[k], hi[k]] as sorted disjoint ranges."""
    order = np.argsort(lo, kind="mergesort")
    out_lo = np.empty(lo.shape[0])
    out_hi = np.empty(lo.shape[0])
    m = 0
    for r in order:
        if m > 0 and lo[r] <= out_hi[m - 1]:
            if hi[r] > out_hi[m - 1]:
                out_hi[m - 1] = hi[r]
        else:
            out_lo[m] = lo[r]
            out_hi[m] = hi[r]
            m += 1
    return out_lo[:m].copy(), out_hi[:m].copy()


@njit(cache=True)
def _flush(buf, nbuf, comp_lo, comp_hi):
    lo = np.empty(comp_lo.shape[0] + nbuf)
    hi = np.empty(comp_lo.shape[0] + nbuf)
    lo[: comp_lo.shape[0]] = comp_lo
    hi[: comp_lo.shape[0]] = comp_hi
    lo[comp_lo.shape[0]:] = buf[:nbuf]
    hi[comp_lo.shape[0]:] = 2.0 * buf[:nbuf]
    return _merge_ranges(lo, hi)


@njit(cache=True)
def wspd_walk(P, sep, store):
    """Enumerate well-separated pairs of the fair split tree.

    A pair (u, v) is accepted once max(diam(u), diam(v)) <= dist(u, v) / sep,
    with diameters and distances taken over tight bounding boxes.  For each
    pair the representative distance is scaled by 3/4 and the ranges
    [l, 2l] are merged on the fly, so memory stays bounded even when the
    pair count is large.  Node pairs are returned only when ``store`` is set.

    Returns (pairs, n_pairs, comp_lo, comp_hi, perm, start, stop).
    """
    perm, start, stop, left, right, box_lo, box_hi = fair_split_tree(P)
    nodes = start.shape[0]
    diag = np.empty(nodes)
    for u in range(nodes):
        diag[u] = _diag(box_lo[u], box_hi[u])
    out = np.empty((max(nodes, 4) if store else 1, 2), dtype=np.int64)
    n_pairs = 0
    bufcap = 1 << 20
    buf = np.empty(bufcap)
    nbuf = 0
    comp_lo = np.empty(0)
    comp_hi = np.empty(0)
    stack = np.empty((max(nodes, 4), 2), dtype=np.int64)
    top = 0
    for u in range(nodes):
        if left[u] >= 0:
            stack[top, 0] = left[u]
            stack[top, 1] = right[u]
            top += 1
    while top > 0:
        top -= 1
        u = stack[top, 0]
        v = stack[top, 1]
        gap = _box_distance(box_lo[u], box_hi[u], box_lo[v], box_hi[v])
        if max(diag[u], diag[v]) * sep <= gap:
            if store:
                if n_pairs == out.shape[0]:
                    no = np.empty((2 * n_pairs, 2), dtype=np.int64)
                    no[:n_pairs] = out
                    out = no
                out[n_pairs, 0] = u
                out[n_pairs, 1] = v
            n_pairs += 1
            buf[nbuf] = 0.75 * math.sqrt(dist2(P[perm[start[u]]], P[perm[start[v]]]))
            nbuf += 1
            if nbuf == bufcap:
                comp_lo, comp_hi = _flush(buf, nbuf, comp_lo, comp_hi)
                nbuf = 0
            continue
        if diag[u] < diag[v] or (diag[u] == diag[v] and left[u] < 0):
            u, v = v, u
        if top + 2 > stack.shape[0]:
            ns = np.empty((2 * stack.shape[0], 2), dtype=np.int64)
            ns[:top] = stack[:top]
            stack = ns
        stack[top, 0] = left[u]
        stack[top, 1] = v
        stack[top + 1, 0] = right[u]
        stack[top + 1, 1] = v
        top += 2
    comp_lo, comp_hi = _flush(buf, nbuf, comp_lo, comp_hi)
    pairs = out[:n_pairs].copy() if store else out[:0].copy()
    return pairs, n_pairs, comp_lo, comp_hi, perm, start, stop


@njit(cache=True)
def discrete_frechet_dp(P, Q):
    """Classic coupling DP, O(len(Q)) memory."""
    n = P.shape[0]
    m = Q.shape[0]
    prev = np.empty(m)
    cur = np.empty(m)
    for j in range(m):
        dj = math.sqrt(dist2(P[0], Q[j]))
        prev[j] = dj if j == 0 else max(prev[j - 1], dj)
    for i in range(1, n):
        cur[0] = max(prev[0], math.sqrt(dist2(P[i], Q[0])))
        for j in range(1, m):
            best = min(prev[j], prev[j - 1], cur[j - 1])
            cur[j] = max(best, math.sqrt(dist2(P[i], Q[j])))
        prev, cur = cur, prev
    return prev[m - 1]


@njit(cache=True)
def cyclic_discrete_frechet(P, Q):
    """Minimum discrete Frechet over rotations of the closed sequence P.

    Each rotation is opened and closed again at its start vertex; Q is
    treated the same way at its first vertex.
    """
    n = P.shape[0]
    m = Q.shape[0]
    Qc = np.empty((m + 1, Q.shape[1]))
    Qc[:m] = Q
    Qc[m] = Q[0]
    R = np.empty((n + 1, P.shape[1]))
    best = np.inf
    for s in range(n):
        if math.sqrt(dist2(P[s], Q[0])) >= best:
            continue
        for k in range(n):
            R[k] = P[(s + k) % n]
        R[n] = P[s]
        val = discrete_frechet_dp(R, Qc)
        if val < best:
            best = val
    return best
