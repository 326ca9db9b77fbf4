"""Conjugacy classes of subgroups of index <= N in a finitely presented group.

Backtracking search over partial coset tables in breadth-first standard
form.  Every definition is propagated through relator scans (forced
deductions, contradictions prune), and a first-in-class test rejects any
partial table whose standardization from another base point would read
lexicographically smaller, so exactly one table per conjugacy class
survives.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

from .coset import UNDEF, CosetTable, coset_representatives, letter_to_col
from .fpgroup import Presentation, Word, cyclic_reduce, free_reduce, word_inverse

__all__ = [
    "SubgroupRecord",
    "SearchBudgetExceeded",
    "low_index_subgroups",
    "eta_sequence",
    "schreier_generators",
]


class SearchBudgetExceeded(RuntimeError):
    """Node or wall-clock budget hit; ``partial`` holds records found so far."""

    def __init__(self, reason: str, partial):
        super().__init__(f"low-index search budget exceeded ({reason})")
        self.reason = reason
        self.partial = partial


@dataclass(frozen=True)
class SubgroupRecord:
    """One conjugacy class of finite-index subgroups.

    ``generators`` are the nontrivial Schreier generators of the class
    representative (the stabilizer of coset 0), and ``class_id`` is the
    ordinal of the record in the canonical output order.
    """

    index: int
    table: CosetTable
    generators: tuple[Word, ...]
    class_id: int


def _relator_columns(presentation) -> list[list[int]]:
    rels = []
    for r in presentation.relators:
        cr = cyclic_reduce(r)
        if cr:
            rels.append([letter_to_col(x) for x in cr])
    rels.sort(key=len)
    return rels


class _Search:
    """Pure-Python reference search; table rows are plain lists."""

    def __init__(self, presentation, max_index, max_nodes, time_budget):
        self.ncols = 2 * presentation.generator_count
        self.max_index = max_index
        rels = _relator_columns(presentation)
        # doubled words allow rotation scans without slicing
        self.rel2 = [r + r for r in rels]
        self.rellen = [len(r) for r in rels]
        scans = [[] for _ in range(self.ncols)]
        for rid, r in enumerate(rels):
            for pos, c in enumerate(r):
                scans[c].append((rid, pos))
        self.scans = scans
        self.table = [[UNDEF] * self.ncols for _ in range(max_index)]
        self.n = 1
        self.found: list[tuple[int, tuple[int, ...]]] = []
        self.nodes = 0
        self.max_nodes = max_nodes
        self.deadline = None if time_budget is None else time.monotonic() + time_budget
        # scratch arrays for the first-in-class test
        self.mu = [0] * max_index
        self.nu_val = [0] * max_index
        self.nu_stamp = [0] * max_index
        self.stamp = 0

    def run(self):
        self._descend(0, 0)
        return self.found

    # -- search ------------------------------------------------------------

    def _descend(self, row_from, col_from):
        table = self.table
        ncols = self.ncols
        n = self.n
        u = -1
        c = col_from
        for i in range(row_from, n):
            row = table[i]
            start = col_from if i == row_from else 0
            for cc in range(start, ncols):
                if row[cc] == UNDEF:
                    u, c = i, cc
                    break
            if u >= 0:
                break
        if u < 0:
            self._emit()
            return
        cp = c ^ 1
        for j in range(n):
            if table[j][cp] == UNDEF:
                self._branch(u, c, j)
        if n < self.max_index:
            self.n = n + 1
            self._branch(u, c, n)
            self.n = n

    def _branch(self, u, c, j):
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise SearchBudgetExceeded("node budget", self.found)
        if self.deadline is not None and self.nodes % 256 == 0:
            if time.monotonic() > self.deadline:
                raise SearchBudgetExceeded("time budget", self.found)
        trail: list = []
        if self._propagate(u, c, j, trail) and self._first_in_class():
            self._descend(u, c)
        for row, cc in trail:
            row[cc] = UNDEF

    def _propagate(self, u, c, v, trail) -> bool:
        """Assign u·c = v, then chase relator scans through new edges."""
        table = self.table
        scans = self.scans
        rel2 = self.rel2
        rellen = self.rellen

        queue = [(u, c)]
        row_u = table[u]
        row_v = table[v]
        cp = c ^ 1
        row_u[c] = v
        trail.append((row_u, c))
        if row_v[cp] == UNDEF:
            row_v[cp] = u
            trail.append((row_v, cp))
            queue.append((v, cp))
        qi = 0
        while qi < len(queue):
            x, col = queue[qi]
            qi += 1
            for rid, s in scans[col]:
                w = rel2[rid]
                end = s + rellen[rid]
                # forward from x along the rotation starting at s
                f = x
                i = s
                while i < end:
                    t = table[f][w[i]]
                    if t == UNDEF:
                        break
                    f = t
                    i += 1
                else:
                    if f != x:
                        return False
                    continue
                # backward from x
                b = x
                k = end
                while k > i:
                    t = table[b][w[k - 1] ^ 1]
                    if t == UNDEF:
                        break
                    b = t
                    k -= 1
                else:
                    # whole word consumed from both ends at distinct cosets
                    return False
                if k == i + 1:
                    # single gap: forced deduction f·w[i] = b
                    col2 = w[i]
                    row_f = table[f]
                    row_b = table[b]
                    cp2 = col2 ^ 1
                    if row_b[cp2] != UNDEF:
                        return False
                    row_f[col2] = b
                    trail.append((row_f, col2))
                    queue.append((f, col2))
                    row_b[cp2] = f
                    trail.append((row_b, cp2))
                    queue.append((b, cp2))
        return True

    def _first_in_class(self) -> bool:
        """Reject tables whose re-based standardization reads lex-smaller."""
        table = self.table
        ncols = self.ncols
        n = self.n
        mu = self.mu
        nu_val = self.nu_val
        nu_stamp = self.nu_stamp
        for alpha in range(1, n):
            stamp = self.stamp = self.stamp + 1
            mu[0] = alpha
            nu_val[alpha] = 0
            nu_stamp[alpha] = stamp
            mlen = 1
            i = 0
            verdict = 0  # 0 unknown/not smaller, -1 rejected
            while i < mlen:
                row_x = table[mu[i]]
                row_y = table[i]
                done = False
                for c in range(ncols):
                    x = row_x[c]
                    y = row_y[c]
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
                            verdict = -1
                        done = True
                        break
                if done:
                    break
                i += 1
            if verdict < 0:
                return False
        return True

    def _emit(self):
        n = self.n
        table = self.table
        for rid, w in enumerate(self.rel2):
            m = self.rellen[rid]
            for i in range(n):
                f = i
                for idx in range(m):
                    f = table[f][w[idx]]
                if f != i:
                    raise RuntimeError("complete table fails a relator scan")
        flat = tuple(x for row in table[:n] for x in row)
        self.found.append((n, flat))


def _table_from_flat(index: int, ncols: int, flat) -> CosetTable:
    cols = tuple(
        tuple(flat[i * ncols + c] for i in range(index)) for c in range(ncols)
    )
    return CosetTable(index=index, columns=cols)


def schreier_generators(table: CosetTable) -> tuple[Word, ...]:
    """Nontrivial Schreier generators of the coset-0 stabilizer.

    Uses the canonical breadth-first representatives: a non-tree edge
    (i, g) with target j contributes rep(i)·g·rep(j)^-1.
    """
    reps = coset_representatives(table)
    gens: list[Word] = []
    seen = set()
    for g in range(1, table.generator_count + 1):
        col = table.columns[letter_to_col(g)]
        for i in range(table.index):
            j = col[i]
            w = free_reduce(reps[i] + (g,) + word_inverse(reps[j]))
            if w and w not in seen:
                seen.add(w)
                gens.append(w)
    return tuple(gens)


def _run_fast(presentation, max_index, max_nodes, time_budget):
    import numpy as np

    from . import _lowindex_fast as fast

    ncols = 2 * presentation.generator_count
    rels = _relator_columns(presentation)
    arrays = fast.prepare_arrays(rels, ncols)
    deadline = -1.0 if time_budget is None else time.monotonic() + time_budget
    nodes_cap = -1 if max_nodes is None else max_nodes
    cap = 4096
    while True:
        out_tables = np.zeros((cap, max_index * ncols), dtype=np.int64)
        out_sizes = np.zeros(cap, dtype=np.int64)
        counters = np.zeros(4, dtype=np.int64)
        status = fast.run_search(
            ncols, max_index, *arrays, nodes_cap, deadline, out_tables, out_sizes, counters
        )
        found = int(counters[0])
        raw = [
            (int(out_sizes[k]), tuple(int(x) for x in out_tables[k, : out_sizes[k] * ncols]))
            for k in range(found)
        ]
        if status == 3:
            cap *= 4
            continue
        if status == 1:
            raise SearchBudgetExceeded("node budget", raw)
        if status == 2:
            raise SearchBudgetExceeded("time budget", raw)
        if status == 4:
            raise RuntimeError("complete table fails a relator scan")
        return raw, ncols


def low_index_subgroups(
    presentation: Presentation,
    max_index: int,
    *,
    max_nodes: int | None = None,
    time_budget: float | None = None,
) -> list[SubgroupRecord]:
    """All conjugacy classes of subgroups of index <= ``max_index``.

    Records are sorted canonically (by index, then lexicographically by
    flattened table) and include the whole group as the index-1 class.
    A node or time budget overrun raises :class:`SearchBudgetExceeded`.

    Runs the compiled search when numba is available; set ``COSETGEO_PURE``
    to force the pure-Python reference implementation.
    """
    if max_index < 1:
        raise ValueError("max_index must be at least 1")
    use_fast = not os.environ.get("COSETGEO_PURE")
    if use_fast:
        try:
            from ._lowindex_fast import HAVE_NUMBA

            use_fast = HAVE_NUMBA
        except ImportError:
            use_fast = False
    if use_fast:
        try:
            raw, ncols = _run_fast(presentation, max_index, max_nodes, time_budget)
        except SearchBudgetExceeded as exc:
            exc.partial = _records_from_raw(exc.partial, 2 * presentation.generator_count)
            raise
        return _records_from_raw(raw, ncols)
    search = _Search(presentation, max_index, max_nodes, time_budget)
    try:
        raw = search.run()
    except SearchBudgetExceeded as exc:
        exc.partial = _records_from_raw(exc.partial, search.ncols)
        raise
    return _records_from_raw(raw, search.ncols)


def _records_from_raw(raw, ncols) -> list[SubgroupRecord]:
    records = []
    for class_id, (index, flat) in enumerate(sorted(raw)):
        table = _table_from_flat(index, ncols, flat)
        gens = schreier_generators(table)
        table = CosetTable(
            index=table.index, columns=table.columns, subgroup_generators=gens
        )
        records.append(
            SubgroupRecord(index=index, table=table, generators=gens, class_id=class_id)
        )
    return records


def eta_sequence(records, max_index: int) -> list[int]:
    """Histogram of conjugacy classes by index, for index 1..max_index.

    Follows the proper-subgroup convention: the index-1 slot excludes the
    whole group, so it reads 0 for every group.
    """
    counts = [0] * max_index
    for rec in records:
        if rec.index <= max_index:
            counts[rec.index - 1] += 1
    counts[0] = max(0, counts[0] - 1)
    return counts
