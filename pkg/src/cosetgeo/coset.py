"""Coset enumeration over a subgroup of a finitely presented group.

The enumerator is relator-driven (HLT scanning) with a union-find
coincidence queue.  Internally cosets are 0-based and the identity coset
(the subgroup itself) is coset 0; serialized tables are 1-based.

Columns are ordered generator-first: column 2k is generator k+1 and
column 2k+1 its inverse, so ``col ^ 1`` flips a letter.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .fpgroup import (
    Presentation,
    Word,
    cyclic_reduce,
    free_reduce,
    parse_word_text,
    render_word,
)

UNDEF = -1


class CosetLimitExceeded(RuntimeError):
    """The live-coset count hit ``max_cosets`` before the table closed."""

    def __init__(self, max_cosets: int):
        super().__init__(f"coset enumeration exceeded {max_cosets} live cosets")
        self.max_cosets = max_cosets


def letter_to_col(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


def col_to_letter(c: int) -> int:
    return c // 2 + 1 if c % 2 == 0 else -(c // 2 + 1)


@dataclass(frozen=True)
class CosetTable:
    """Complete action table of the generators on the cosets of a subgroup.

    ``columns[c][i]`` is the image of coset ``i`` under the letter of
    column ``c``.  Tables are stored in breadth-first standard form:
    cosets are numbered in order of first appearance when the rows are
    read in column order.
    """

    index: int
    columns: tuple[tuple[int, ...], ...]
    subgroup_generators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(tuple(col) for col in self.columns))
        object.__setattr__(
            self, "subgroup_generators", tuple(tuple(w) for w in self.subgroup_generators)
        )

    @property
    def generator_count(self) -> int:
        return len(self.columns) // 2

    def act(self, coset: int, letter: int) -> int:
        return self.columns[letter_to_col(letter)][coset]

    def trace(self, coset: int, word) -> int:
        for x in word:
            coset = self.columns[letter_to_col(x)][coset]
        return coset

    def validate(self, presentation: Presentation) -> None:
        """Check the defining invariants; raises ValueError on any failure."""
        d = self.index
        if len(self.columns) != 2 * presentation.generator_count:
            raise ValueError("column count does not match the presentation")
        for c, col in enumerate(self.columns):
            if sorted(col) != list(range(d)):
                raise ValueError(f"column {c} is not a permutation of the cosets")
            inv = self.columns[c ^ 1]
            for i in range(d):
                if inv[col[i]] != i:
                    raise ValueError(f"column {c} is not inverse to column {c ^ 1}")
        for r in presentation.relators:
            for i in range(d):
                if self.trace(i, r) != i:
                    raise ValueError(f"relator {r!r} does not close at coset {i}")
        for w in self.subgroup_generators:
            if self.trace(0, w) != 0:
                raise ValueError(f"subgroup generator {w!r} does not close at coset 0")

    def to_json(self, names) -> dict:
        reps = coset_representatives(self)
        return {
            "index": self.index,
            "action": [
                [self.columns[2 * g][i] + 1 for i in range(self.index)]
                for g in range(self.generator_count)
            ],
            "reps": [render_word(w, names) for w in reps],
        }

    @classmethod
    def from_json(cls, data: dict, names=None, subgroup_generators=()) -> "CosetTable":
        action = data["action"]
        d = data["index"]
        cols = []
        for targets in action:
            fwd = tuple(t - 1 for t in targets)
            inv = [0] * d
            for i, t in enumerate(fwd):
                inv[t] = i
            cols.append(fwd)
            cols.append(tuple(inv))
        return cls(index=d, columns=tuple(cols), subgroup_generators=subgroup_generators)


def coset_representatives(table: CosetTable) -> list[Word]:
    """Shortest transversal words via breadth-first search from coset 0.

    Ties are broken by column order (generator declaration order, then the
    inverse), which is exactly the order that standard form numbers cosets,
    so ``rep(i)`` traces from coset 0 to coset i.
    """
    d = table.index
    ncols = len(table.columns)
    reps: list[Word | None] = [None] * d
    reps[0] = ()
    queue = deque([0])
    seen = 1
    while queue and seen < d:
        i = queue.popleft()
        for c in range(ncols):
            j = table.columns[c][i]
            if reps[j] is None:
                reps[j] = reps[i] + (col_to_letter(c),)
                seen += 1
                queue.append(j)
    return [r if r is not None else () for r in reps]


class _Enumerator:
    def __init__(self, presentation: Presentation, subgroup_words, max_cosets: int):
        self.ncols = 2 * presentation.generator_count
        self.relators = []
        for r in presentation.relators:
            cr = cyclic_reduce(r)
            if cr:
                self.relators.append([letter_to_col(x) for x in cr])
        self.relators.sort(key=len)
        self.subgens = [[letter_to_col(x) for x in free_reduce(w)] for w in subgroup_words]
        self.max_cosets = max_cosets
        self.rows = [[UNDEF] * self.ncols]
        self.parent = [0]
        self.live = 1
        self.ops = 0

    def rep(self, a: int) -> int:
        parent = self.parent
        r = a
        while parent[r] != r:
            r = parent[r]
        while parent[a] != r:
            parent[a], a = r, parent[a]
        return r

    def define(self, a: int, c: int) -> int:
        if self.live >= self.max_cosets:
            raise CosetLimitExceeded(self.max_cosets)
        b = len(self.parent)
        self.parent.append(b)
        self.rows.append([UNDEF] * self.ncols)
        self.rows[a][c] = b
        self.rows[b][c ^ 1] = a
        self.live += 1
        self.ops += 1
        return b

    def _merge(self, a: int, b: int, queue) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.live -= 1
        self.ops += 1
        queue.append(b)

    def coincide(self, a: int, b: int) -> None:
        queue: deque[int] = deque()
        self._merge(a, b, queue)
        rows = self.rows
        while queue:
            dead = queue.popleft()
            row = rows[dead]
            for c in range(self.ncols):
                target = row[c]
                if target == UNDEF:
                    continue
                rows[target][c ^ 1] = UNDEF
                mu = self.rep(dead)
                nu = self.rep(target)
                if rows[mu][c] != UNDEF:
                    self._merge(rows[mu][c], nu, queue)
                elif rows[nu][c ^ 1] != UNDEF:
                    self._merge(rows[nu][c ^ 1], mu, queue)
                else:
                    rows[mu][c] = nu
                    rows[nu][c ^ 1] = mu

    def scan_and_fill(self, a: int, word) -> None:
        if not word:
            return
        rows = self.rows
        f, i = a, 0
        b, j = a, len(word) - 1
        while True:
            while i <= j and rows[f][word[i]] != UNDEF:
                f = self.rep(rows[f][word[i]])
                i += 1
            if i > j:
                if f != b:
                    self.coincide(f, b)
                return
            while j >= i and rows[b][word[j] ^ 1] != UNDEF:
                b = self.rep(rows[b][word[j] ^ 1])
                j -= 1
            if j < i:
                self.coincide(f, b)
                return
            if j == i:
                rows[f][word[i]] = b
                rows[b][word[i] ^ 1] = f
                return
            self.define(f, word[i])

    def _mirror_repair(self, i: int) -> None:
        # coincidence collapse can leave a live row's inverse slot undefined
        rows = self.rows
        for c in range(self.ncols):
            j = rows[i][c]
            if j == UNDEF:
                continue
            j = self.rep(j)
            rows[i][c] = j
            back = rows[j][c ^ 1]
            if back == UNDEF:
                rows[j][c ^ 1] = i
                self.ops += 1
            elif self.rep(back) != i:
                self.coincide(back, i)
                return

    def _sweep(self) -> None:
        for w in self.subgens:
            self.scan_and_fill(0, w)
        alpha = 0
        while alpha < len(self.rows):
            if self.rep(alpha) != alpha:
                alpha += 1
                continue
            self._mirror_repair(alpha)
            for r in self.relators:
                if self.rep(alpha) != alpha:
                    break
                self.scan_and_fill(alpha, r)
            if self.rep(alpha) == alpha:
                for c in range(self.ncols):
                    if self.rows[alpha][c] == UNDEF:
                        self.define(alpha, c)
            alpha += 1

    def run(self) -> None:
        # sweep until a pass makes no definition, merge, or repair
        while True:
            before = self.ops
            self._sweep()
            if self.ops == before:
                return

    def standardized_columns(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        # relabel live cosets in BFS order from coset 0, column order first
        order: list[int] = [self.rep(0)]
        new_id = {order[0]: 0}
        qi = 0
        while qi < len(order):
            i = order[qi]
            qi += 1
            for c in range(self.ncols):
                t = self.rows[i][c]
                if t == UNDEF:
                    raise RuntimeError("closed table has an undefined entry")
                j = self.rep(t)
                if j not in new_id:
                    new_id[j] = len(order)
                    order.append(j)
        d = len(order)
        if d != self.live:
            raise RuntimeError("closed table is not transitive")
        cols = []
        for c in range(self.ncols):
            col = []
            for i in order:
                t = self.rows[i][c]
                if t == UNDEF:
                    raise RuntimeError("closed table has an undefined entry")
                col.append(new_id[self.rep(t)])
            cols.append(tuple(col))
        return d, tuple(cols)


def enumerate_cosets(
    presentation: Presentation,
    subgroup_generators=(),
    max_cosets: int = 2_000_000,
) -> CosetTable:
    """Todd-Coxeter enumeration of the cosets of ``<subgroup_generators>``.

    Raises :class:`CosetLimitExceeded` when the live-coset count would pass
    ``max_cosets`` (enumeration need not terminate at infinite index).  On
    success the returned table is complete, collapsed, standardized and
    validated.
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be at least 1")
    words = [tuple(w) for w in subgroup_generators]
    enum = _Enumerator(presentation, words, max_cosets)
    enum.run()
    d, cols = enum.standardized_columns()
    table = CosetTable(index=d, columns=cols, subgroup_generators=tuple(words))
    table.validate(presentation)
    return table


def parse_subgroup_words(text: str, presentation: Presentation) -> tuple[Word, ...]:
    """Comma-separated word list over the presentation's generators."""
    parts = [p.strip() for p in text.split(",")]
    return tuple(parse_word_text(p, presentation.names) for p in parts if p)
