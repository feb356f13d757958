"""Compiled inner loops over CSR adjacency (numba)."""

import numpy as np
from numba import njit


@njit(cache=True)
def retained_mask(indptr, indices, tau):
    n = len(indptr) - 1
    out = np.ones(n, dtype=np.bool_)
    for v in range(n):
        c = tau[v]
        for k in range(indptr[v], indptr[v + 1]):
            if tau[indices[k]] == c:
                out[v] = False
                break
    return out


@njit(cache=True)
def _codegree_at_least(indptr, indices, stamp, u, v, thr):
    # stamp[w] == u marks w in N(u)
    hits = 0
    misses = 0
    budget = (indptr[v + 1] - indptr[v]) - thr
    if budget < 0:
        return False
    for k in range(indptr[v], indptr[v + 1]):
        if stamp[indices[k]] == u:
            hits += 1
            if hits >= thr:
                return True
        else:
            misses += 1
            if misses > budget:
                return False
    return hits >= thr


@njit(cache=True)
def dense_vertices(indptr, indices, thr_codeg, thr_friends):
    """Vertices with at least ``thr_friends`` neighbours of codegree >= ``thr_codeg``."""
    n = len(indptr) - 1
    stamp = np.full(n, -1, dtype=np.int64)
    out = np.zeros(n, dtype=np.bool_)
    for u in range(n):
        deg = indptr[u + 1] - indptr[u]
        budget = deg - thr_friends
        if budget < 0:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            stamp[indices[k]] = u
        friends = 0
        nonfriends = 0
        for k in range(indptr[u], indptr[u + 1]):
            if _codegree_at_least(indptr, indices, stamp, u, indices[k], thr_codeg):
                friends += 1
                if friends >= thr_friends:
                    out[u] = True
                    break
            else:
                nonfriends += 1
                if nonfriends > budget:
                    break
    return out


@njit(cache=True)
def friend_edges(indptr, indices, mask, thr_codeg):
    """Pairs (u < v), both in ``mask``, adjacent with codegree >= ``thr_codeg``."""
    n = len(indptr) - 1
    stamp = np.full(n, -1, dtype=np.int64)
    us = []
    vs = []
    for u in range(n):
        if not mask[u]:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            stamp[indices[k]] = u
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v > u and mask[v] and _codegree_at_least(indptr, indices, stamp, u, v, thr_codeg):
                us.append(u)
                vs.append(v)
    out = np.empty((len(us), 2), dtype=np.int64)
    for i in range(len(us)):
        out[i, 0] = us[i]
        out[i, 1] = vs[i]
    return out


@njit(cache=True)
def low_codegree_counts(indptr, indices, vertices, thr_codeg, cap):
    """Per vertex, number of neighbours with codegree < ``thr_codeg``.

    Counting stops once it exceeds ``cap`` (pass a negative cap for exact counts).
    """
    n = len(indptr) - 1
    stamp = np.full(n, -1, dtype=np.int64)
    out = np.zeros(len(vertices), dtype=np.int64)
    for i in range(len(vertices)):
        u = vertices[i]
        for k in range(indptr[u], indptr[u + 1]):
            stamp[indices[k]] = u
        c = 0
        for k in range(indptr[u], indptr[u + 1]):
            if not _codegree_at_least(indptr, indices, stamp, u, indices[k], thr_codeg):
                c += 1
                if cap >= 0 and c > cap:
                    break
        out[i] = c
    return out


@njit(cache=True)
def neighbourhood_nonedges(indptr, indices, vertices):
    """Per vertex v, the number of non-adjacent pairs inside N(v)."""
    n = len(indptr) - 1
    stamp = np.full(n, -1, dtype=np.int64)
    out = np.zeros(len(vertices), dtype=np.int64)
    for i in range(len(vertices)):
        u = vertices[i]
        deg = indptr[u + 1] - indptr[u]
        for k in range(indptr[u], indptr[u + 1]):
            stamp[indices[k]] = u
        inside = 0
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            for j in range(indptr[w], indptr[w + 1]):
                if stamp[indices[j]] == u:
                    inside += 1
        out[i] = deg * (deg - 1) // 2 - inside // 2
    return out


@njit(cache=True)
def codegree(indptr, indices, u, v):
    i = indptr[u]
    j = indptr[v]
    c = 0
    while i < indptr[u + 1] and j < indptr[v + 1]:
        a = indices[i]
        b = indices[j]
        if a == b:
            c += 1
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return c


@njit(cache=True)
def retained_neighbour_stats(indptr, indices, tau, retained, vertices, palette_size):
    """Per vertex v: |T ∩ N_v| and the number of distinct tau-colours on T ∩ N_v."""
    seen = np.full(palette_size, -1, dtype=np.int64)
    count = np.zeros(len(vertices), dtype=np.int64)
    distinct = np.zeros(len(vertices), dtype=np.int64)
    for i in range(len(vertices)):
        v = vertices[i]
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if retained[w]:
                count[i] += 1
                c = tau[w]
                if seen[c] != v:
                    seen[c] = v
                    distinct[i] += 1
    return count, distinct


@njit(cache=True)
def unblocked_mask(indptr, indices, colors, sigma, targets, palette_size):
    """``colors[v, j]`` not used by any sigma-coloured neighbour of v (rows in ``targets``)."""
    n, width = colors.shape
    out = np.zeros((n, width), dtype=np.bool_)
    stamp = np.full(palette_size, -1, dtype=np.int64)
    for i in range(len(targets)):
        v = targets[i]
        for k in range(indptr[v], indptr[v + 1]):
            c = sigma[indices[k]]
            if c >= 0:
                stamp[c] = v
        for j in range(width):
            c = colors[v, j]
            if c >= 0 and stamp[c] != v:
                out[v, j] = True
    return out


@njit(cache=True)
def colour_degrees(indptr, indices, colors, alive, competitors, targets, palette_size):
    """For v in ``targets`` and each alive slot j: #{w ∈ N_v ∩ competitors : colors[v,j] ∈ colors[w]}."""
    n, width = colors.shape
    slot = np.full(palette_size, -1, dtype=np.int64)
    owner = np.full(palette_size, -1, dtype=np.int64)
    out = np.zeros((n, width), dtype=np.int64)
    for i in range(len(targets)):
        v = targets[i]
        for j in range(width):
            if alive[v, j]:
                c = colors[v, j]
                slot[c] = j
                owner[c] = v
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if not competitors[w]:
                continue
            for j in range(width):
                c = colors[w, j]
                if c >= 0 and owner[c] == v:
                    out[v, slot[c]] += 1
    return out


@njit(cache=True)
def greedy_list_colour(indptr, indices, sequence, colors, alive, sigma, u, palette_size):
    """Colour ``sequence`` in order, each vertex by a uniformly chosen still-allowed alive colour.

    ``sigma`` is updated in place.  Returns the position in ``sequence`` of the
    first vertex with no allowed colour, or -1 on success.
    """
    width = colors.shape[1]
    stamp = np.full(palette_size, -1, dtype=np.int64)
    options = np.empty(width, dtype=np.int64)
    for i in range(len(sequence)):
        v = sequence[i]
        for k in range(indptr[v], indptr[v + 1]):
            c = sigma[indices[k]]
            if c >= 0:
                stamp[c] = v
        k_opt = 0
        for j in range(width):
            if alive[v, j]:
                c = colors[v, j]
                if stamp[c] != v:
                    options[k_opt] = c
                    k_opt += 1
        if k_opt == 0:
            return i
        pick = int(u[i] * k_opt)
        if pick >= k_opt:
            pick = k_opt - 1
        sigma[v] = options[pick]
    return -1


@njit(cache=True)
def proper_violation(indptr, indices, sigma):
    """First vertex with an uncoloured entry or a same-coloured neighbour, else -1."""
    n = len(indptr) - 1
    for v in range(n):
        if sigma[v] < 0:
            return v
        for k in range(indptr[v], indptr[v + 1]):
            if sigma[indices[k]] == sigma[v]:
                return v
    return -1


@njit(cache=True)
def csr_from_edges(n, u, v):
    """Symmetric CSR with sorted, de-duplicated rows from an edge list (no loops)."""
    deg = np.zeros(n + 1, dtype=np.int64)
    for i in range(len(u)):
        deg[u[i] + 1] += 1
        deg[v[i] + 1] += 1
    ptr = np.cumsum(deg)
    fill = ptr[:-1].copy()
    idx = np.empty(ptr[-1], dtype=np.int32)
    for i in range(len(u)):
        a = u[i]
        b = v[i]
        idx[fill[a]] = b
        fill[a] += 1
        idx[fill[b]] = a
        fill[b] += 1
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    w = 0
    for x in range(n):
        row = np.sort(idx[ptr[x]:ptr[x + 1]])
        last = -1
        for y in row:
            if y != last:
                idx[w] = y
                w += 1
                last = y
        out_ptr[x + 1] = w
    return out_ptr, idx[:w].copy()


@njit(cache=True)
def _adjacent(nbr, owner, start, stop, skip, x):
    for s in range(start, stop):
        if owner[s] != skip and nbr[s] == x:
            return True
    return False


@njit(cache=True)
def repair_pairing(n, D, u, v, seed, max_proposals, keep_sides=False):
    """Remove loops and repeated pairs from a D-regular pairing by double-edge swaps.

    Each defective pair e = (a, b) is swapped with a uniformly random pair
    f = (c, d) (random orientation) into (a, c), (b, d), accepted only when
    neither new pair is a loop or already present.  With ``keep_sides`` every
    ``u`` end stays a ``u`` end, so a bipartite pairing stays bipartite.
    ``u``/``v`` are edited in place.  Returns the number of defects left.
    """
    np.random.seed(seed)
    m = len(u)
    # slot k of vertex x lies in [x*D, (x+1)*D); owner[k] is its edge id
    # index arrays share the dtype of u (int32 whenever n*D allows it)
    nbr = np.empty(n * D, dtype=u.dtype)
    owner = np.empty(n * D, dtype=u.dtype)
    slot_u = np.empty(m, dtype=u.dtype)
    slot_v = np.empty(m, dtype=u.dtype)
    fill = np.zeros(n, dtype=np.int64)
    for e in range(m):
        a = u[e]
        b = v[e]
        k = a * D + fill[a]
        fill[a] += 1
        nbr[k] = b
        owner[k] = e
        slot_u[e] = k
        k = b * D + fill[b]
        fill[b] += 1
        nbr[k] = a
        owner[k] = e
        slot_v[e] = k

    def defective(e):
        a = u[e]
        b = v[e]
        if a == b:
            return True
        return _adjacent(nbr, owner, a * D, a * D + D, e, b)

    # initial defects: loops, and repeats found by sorting each vertex's slots
    flagged = np.zeros(m, dtype=np.bool_)
    for x in range(n):
        base = x * D
        order = np.argsort(nbr[base:base + D])
        for j in range(D):
            k = base + order[j]
            if nbr[k] == x:
                flagged[owner[k]] = True
            if j > 0 and nbr[k] == nbr[base + order[j - 1]]:
                flagged[owner[k]] = True
    queue = np.empty(np.count_nonzero(flagged), dtype=np.int64)
    q = 0
    for e in range(m):
        if flagged[e]:
            queue[q] = e
            q += 1
    proposals = 0
    while q > 0 and proposals < max_proposals:
        # drop entries already fixed as a side effect
        e = queue[q - 1]
        if not defective(e):
            q -= 1
            continue
        proposals += 1
        f = np.random.randint(0, m)
        if f == e:
            continue
        a = u[e]
        b = v[e]
        if not keep_sides and np.random.random() < 0.5:
            c = u[f]
            d = v[f]
            sc = slot_u[f]
            sd = slot_v[f]
        else:
            c = v[f]
            d = u[f]
            sc = slot_v[f]
            sd = slot_u[f]
        if a == c or b == d:
            continue
        if _adjacent(nbr, owner, a * D, a * D + D, -1, c):
            continue
        if _adjacent(nbr, owner, b * D, b * D + D, -1, d):
            continue
        sa = slot_u[e]
        sb = slot_v[e]
        # e becomes (a, c) on slots sa, sc; f becomes (b, d) on slots sb, sd
        nbr[sa] = c
        nbr[sc] = a
        owner[sc] = e
        nbr[sb] = d
        owner[sb] = f
        nbr[sd] = b
        u[e] = a
        v[e] = c
        slot_u[e] = sa
        slot_v[e] = sc
        if keep_sides:
            u[f] = d
            v[f] = b
            slot_u[f] = sd
            slot_v[f] = sb
        else:
            u[f] = b
            v[f] = d
            slot_u[f] = sb
            slot_v[f] = sd
    left = 0
    for i in range(q):
        if defective(queue[i]):
            left += 1
    return left


@njit(cache=True)
def dynamic_list_colour(indptr, indices, sequence, colors, alive, sigma, u, palette_size):
    """Greedy that always colours a vertex with fewest still-allowed colours.

    Ties go to the earlier vertex of ``sequence`` (or the one most recently
    demoted).  The colour is uniform among the allowed ones, drawn with
    ``u[step]``.  Returns the position in ``sequence`` of a vertex left with no
    allowed colour, or -1 on success; ``sigma`` is updated in place.
    """
    n = len(indptr) - 1
    width = colors.shape[1]
    m = len(sequence)
    local = np.full(n, -1, dtype=np.int64)
    for i in range(m):
        local[sequence[i]] = i
    avail = np.zeros((m, width), dtype=np.bool_)
    cnt = np.zeros(m, dtype=np.int64)
    stamp = np.full(palette_size, -1, dtype=np.int64)
    for i in range(m):
        v = sequence[i]
        for k in range(indptr[v], indptr[v + 1]):
            c = sigma[indices[k]]
            if c >= 0:
                stamp[c] = v
        for j in range(width):
            if alive[v, j] and stamp[colors[v, j]] != v:
                avail[i, j] = True
                cnt[i] += 1
    # bucket queue: doubly linked list per remaining-option count
    head = np.full(width + 1, -1, dtype=np.int64)
    nxt = np.full(m, -1, dtype=np.int64)
    prv = np.full(m, -1, dtype=np.int64)
    for i in range(m - 1, -1, -1):
        b = cnt[i]
        nxt[i] = head[b]
        if head[b] >= 0:
            prv[head[b]] = i
        head[b] = i
    done = np.zeros(m, dtype=np.bool_)
    options = np.empty(width, dtype=np.int64)
    low = 0
    for step in range(m):
        while low <= width and head[low] < 0:
            low += 1
        i = head[low]
        if low == 0:
            return i
        # unlink i
        head[low] = nxt[i]
        if nxt[i] >= 0:
            prv[nxt[i]] = -1
        done[i] = True
        v = sequence[i]
        k_opt = 0
        for j in range(width):
            if avail[i, j]:
                options[k_opt] = colors[v, j]
                k_opt += 1
        pick = int(u[step] * k_opt)
        if pick >= k_opt:
            pick = k_opt - 1
        c = options[pick]
        sigma[v] = c
        for k in range(indptr[v], indptr[v + 1]):
            x = local[indices[k]]
            if x < 0 or done[x]:
                continue
            w = sequence[x]
            for j in range(width):
                if avail[x, j] and colors[w, j] == c:
                    avail[x, j] = False
                    b = cnt[x]
                    # move x from bucket b to the head of bucket b - 1
                    if prv[x] >= 0:
                        nxt[prv[x]] = nxt[x]
                    else:
                        head[b] = nxt[x]
                    if nxt[x] >= 0:
                        prv[nxt[x]] = prv[x]
                    cnt[x] = b - 1
                    prv[x] = -1
                    nxt[x] = head[b - 1]
                    if head[b - 1] >= 0:
                        prv[head[b - 1]] = x
                    head[b - 1] = x
                    if b - 1 < low:
                        low = b - 1
    return -1
