"""Numba-compiled twin of the low-index backtracking search.

Same algorithm as :class:`cosetgeo.lowindex._Search`, restated as an
iterative DFS over flat int64 arrays so it can run in nopython mode.
``lowindex`` falls back to the pure-Python search when numba is missing
or ``COSETGEO_PURE`` is set; tests cross-check the two on small inputs.

Status codes returned by :func:`run_search`: 0 done, 1 node budget,
2 time budget, 3 output overflow, 4 internal scan failure.
"""

from __future__ import annotations

import time as _time

import numpy as np

try:
    from numba import njit, objmode

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # pragma: no cover
        def wrap(fn):
            return fn

        return wrap


UNDEF = -1

if HAVE_NUMBA:

    @njit(cache=True)
    def _propagate(table, ncols, u, c, v, trail, tlen, queue,
                   rel2, rel_off, rel_len, scan_rid, scan_pos, scan_off):
        qlen = 0
        cp = c ^ 1
        table[u * ncols + c] = v
        trail[tlen] = u * ncols + c
        tlen += 1
        queue[qlen] = u * ncols + c
        qlen += 1
        if table[v * ncols + cp] == UNDEF:
            table[v * ncols + cp] = u
            trail[tlen] = v * ncols + cp
            tlen += 1
            queue[qlen] = v * ncols + cp
            qlen += 1
        qi = 0
        while qi < qlen:
            enc = queue[qi]
            qi += 1
            x = enc // ncols
            col = enc % ncols
            for si in range(scan_off[col], scan_off[col + 1]):
                rid = scan_rid[si]
                s = rel_off[rid] + scan_pos[si]
                end = s + rel_len[rid]
                f = x
                i = s
                while i < end:
                    t = table[f * ncols + rel2[i]]
                    if t == UNDEF:
                        break
                    f = t
                    i += 1
                if i == end:
                    if f != x:
                        return -1, tlen
                    continue
                b = x
                k = end
                while k > i:
                    t = table[b * ncols + (rel2[k - 1] ^ 1)]
                    if t == UNDEF:
                        break
                    b = t
                    k -= 1
                if k == i:
                    return -1, tlen
                if k == i + 1:
                    col2 = rel2[i]
                    cp2 = col2 ^ 1
                    if table[b * ncols + cp2] != UNDEF:
                        return -1, tlen
                    table[f * ncols + col2] = b
                    trail[tlen] = f * ncols + col2
                    tlen += 1
                    queue[qlen] = f * ncols + col2
                    qlen += 1
                    table[b * ncols + cp2] = f
                    trail[tlen] = b * ncols + cp2
                    tlen += 1
                    queue[qlen] = b * ncols + cp2
                    qlen += 1
        return 0, tlen

    @njit(cache=True)
    def _first_in_class(table, ncols, n, mu, nu_val, nu_stamp, stamp):
        for alpha in range(1, n):
            stamp += 1
            mu[0] = alpha
            nu_val[alpha] = 0
            nu_stamp[alpha] = stamp
            mlen = 1
            i = 0
            rejected = False
            done = False
            while i < mlen and not done:
                xbase = mu[i] * ncols
                ybase = i * ncols
                for c in range(ncols):
                    x = table[xbase + c]
                    y = table[ybase + c]
                    if x < 0 or y < 0:
                        done = True
                        break
                    if nu_stamp[x] == stamp:
                        xv = nu_val[x]
                    else:
                        nu_stamp[x] = stamp
                        nu_val[x] = mlen
                        xv = mlen
                        mu[mlen] = x
                        mlen += 1
                    if xv != y:
                        if xv < y:
                            rejected = True
                        done = True
                        break
                i += 1
            if rejected:
                return False, stamp
        return True, stamp

    @njit(cache=True)
    def run_search(ncols, max_index, rel2, rel_off, rel_len,
                   scan_rid, scan_pos, scan_off, max_nodes, deadline,
                   out_tables, out_sizes, counters):
        size = max_index * ncols
        table = np.full(size, UNDEF, dtype=np.int64)
        trail = np.empty(size + 4, dtype=np.int64)
        queue = np.empty(2 * size + 8, dtype=np.int64)
        mu = np.zeros(max_index, dtype=np.int64)
        nu_val = np.zeros(max_index, dtype=np.int64)
        nu_stamp = np.zeros(max_index, dtype=np.int64)
        stamp = 0

        maxdepth = size + 2
        f_pos = np.zeros(maxdepth, dtype=np.int64)
        f_j = np.zeros(maxdepth, dtype=np.int64)
        f_nbefore = np.zeros(maxdepth, dtype=np.int64)
        f_tstart = np.zeros(maxdepth, dtype=np.int64)

        n = 1
        nodes = 0
        found = 0
        tlen = 0

        depth = 0
        f_pos[0] = 0
        f_j[0] = 0
        f_nbefore[0] = n
        f_tstart[0] = 0

        while depth >= 0:
            # rewind this frame's previous attempt
            while tlen > f_tstart[depth]:
                tlen -= 1
                table[trail[tlen]] = UNDEF
            n = f_nbefore[depth]
            j = f_j[depth]
            limit = n + 1 if n < max_index else n
            pos = f_pos[depth]
            u = pos // ncols
            c = pos % ncols
            cp = c ^ 1
            # advance to the next admissible candidate
            while j < limit and j < n and table[j * ncols + cp] != UNDEF:
                j += 1
            if j >= limit:
                depth -= 1
                continue
            f_j[depth] = j + 1
            nodes += 1
            if max_nodes >= 0 and nodes > max_nodes:
                counters[0] = found
                counters[1] = nodes
                return 1
            if deadline >= 0.0 and nodes % 65536 == 0:
                with objmode(now="float64"):
                    now = _time.monotonic()
                if now > deadline:
                    counters[0] = found
                    counters[1] = nodes
                    return 2
            if j == n:
                n += 1
            ok, tlen = _propagate(table, ncols, u, c, j, trail, tlen, queue,
                                  rel2, rel_off, rel_len,
                                  scan_rid, scan_pos, scan_off)
            if ok < 0:
                continue
            good, stamp = _first_in_class(table, ncols, n, mu, nu_val, nu_stamp, stamp)
            if not good:
                continue
            # find the next undefined slot at or after pos
            nxt = -1
            for p in range(pos, n * ncols):
                if table[p] == UNDEF:
                    nxt = p
                    break
            if nxt < 0:
                # complete: verify every relator closes at every coset
                for rid in range(len(rel_len)):
                    s = rel_off[rid]
                    m = rel_len[rid]
                    for i in range(n):
                        f = i
                        for idx in range(s, s + m):
                            f = table[f * ncols + rel2[idx]]
                        if f != i:
                            counters[0] = found
                            counters[1] = nodes
                            return 4
                if found >= out_tables.shape[0]:
                    counters[0] = found
                    counters[1] = nodes
                    return 3
                out_sizes[found] = n
                for p in range(n * ncols):
                    out_tables[found, p] = table[p]
                found += 1
                continue
            depth += 1
            f_pos[depth] = nxt
            f_j[depth] = 0
            f_nbefore[depth] = n
            f_tstart[depth] = tlen

        counters[0] = found
        counters[1] = nodes
        return 0


def prepare_arrays(rels, ncols):
    """Flatten relators (doubled for rotations) and the per-column scan lists."""
    rel2 = []
    rel_off = []
    rel_len = []
    for r in rels:
        rel_off.append(len(rel2))
        rel2.extend(r + r)
        rel_len.append(len(r))
    scans = [[] for _ in range(ncols)]
    for rid, r in enumerate(rels):
        for pos, c in enumerate(r):
            scans[c].append((rid, pos))
    scan_rid = []
    scan_pos = []
    scan_off = [0]
    for c in range(ncols):
        for rid, pos in scans[c]:
            scan_rid.append(rid)
            scan_pos.append(pos)
        scan_off.append(len(scan_rid))
    as64 = lambda xs: np.asarray(xs, dtype=np.int64)
    return (
        as64(rel2),
        as64(rel_off),
        as64(rel_len),
        as64(scan_rid),
        as64(scan_pos),
        as64(scan_off),
    )
