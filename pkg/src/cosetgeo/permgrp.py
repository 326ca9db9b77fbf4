"""Permutation groups on {0..d-1} with a stabilizer-chain backbone.

Permutations are image tuples; ``p_mul(a, b)`` applies ``a`` first, so
words act on cosets left to right.  Text I/O uses 1-based disjoint cycle
notation like ``(1,2,4)(3,7)``.

The chain is the deterministic (non-randomized) Schreier-Sims with base
points taken from an optional prescribed prefix and then by smallest
moved point; no randomization anywhere, so all derived data (orders,
stabilizers, closures) is reproducible.
"""

from __future__ import annotations

from .coset import CosetTable
from .fpgroup import Word

Perm = tuple[int, ...]


def p_identity(n: int) -> Perm:
    return tuple(range(n))


def p_mul(a: Perm, b: Perm) -> Perm:
    """Apply ``a`` then ``b``."""
    return tuple(b[x] for x in a)


def p_inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def p_is_identity(a: Perm) -> bool:
    return all(i == x for i, x in enumerate(a))


def p_parity(a: Perm) -> int:
    """0 for even, 1 for odd."""
    seen = [False] * len(a)
    parity = 0
    for i in range(len(a)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = a[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def parse_cycles(text: str, degree: int | None = None) -> Perm:
    """Parse 1-based cycle notation; ``()`` is the identity."""
    pieces: list[list[int]] = []
    i = 0
    mx = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace() or ch == ",":
            i += 1
            continue
        if ch != "(":
            raise ValueError(f"expected '(' at position {i + 1} of {text!r}")
        j = text.index(")", i)
        body = text[i + 1 : j].strip()
        i = j + 1
        if not body:
            continue
        cycle = [int(tok) for tok in body.replace(",", " ").split()]
        if len(set(cycle)) != len(cycle) or min(cycle) < 1:
            raise ValueError(f"invalid cycle {body!r}")
        mx = max(mx, max(cycle))
        pieces.append([x - 1 for x in cycle])
    n = degree if degree is not None else mx
    if mx > n:
        raise ValueError(f"cycle point {mx} exceeds degree {n}")
    images = list(range(n))
    moved: set[int] = set()
    for cycle in pieces:
        for a in cycle:
            if a in moved:
                raise ValueError("cycles are not disjoint")
            moved.add(a)
        for k, a in enumerate(cycle):
            images[a] = cycle[(k + 1) % len(cycle)]
    return tuple(images)


def format_cycles(p: Perm) -> str:
    """Disjoint cycles, fixed points omitted, 1-based."""
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cycle = []
        j = i
        while not seen[j]:
            seen[j] = True
            cycle.append(str(j + 1))
            j = p[j]
        parts.append("(" + ",".join(cycle) + ")")
    return "".join(parts) if parts else "()"


class _Chain:
    """Stabilizer chain: base points, per-level generators and transversals."""

    def __init__(self, generators, degree: int, prefix=()):
        self.degree = degree
        self.base: list[int] = []
        self.gens: list[list[Perm]] = []
        self.trans: list[dict[int, Perm]] = []
        self._prefix = list(prefix)
        self._identity = p_identity(degree)
        gens = [tuple(g) for g in generators if not p_is_identity(tuple(g))]
        for pt in self._prefix:
            self._add_level(pt)
        if not self.base and gens:
            self._add_level(self._min_moved(gens[0]))
        if self.base:
            self.gens[0] = list(gens)
            self._verify(0)

    def _min_moved(self, g: Perm) -> int:
        return min(i for i in range(self.degree) if g[i] != i)

    def _add_level(self, pt: int):
        self.base.append(pt)
        self.gens.append([])
        self.trans.append({pt: self._identity})

    def _orbit(self, level: int):
        t = {self.base[level]: self._identity}
        queue = [self.base[level]]
        qi = 0
        gens = self.gens[level]
        while qi < len(queue):
            p = queue[qi]
            qi += 1
            up = t[p]
            for s in gens:
                q = s[p]
                if q not in t:
                    t[q] = p_mul(up, s)
                    queue.append(q)
        self.trans[level] = t

    def strip(self, g: Perm, start: int = 0):
        """Sift ``g`` through levels >= start; returns (residue, level)."""
        i = start
        while i < len(self.base):
            p = g[self.base[i]]
            t = self.trans[i]
            if p not in t:
                return g, i
            g = p_mul(g, p_inv(t[p]))
            i += 1
        return g, len(self.base)

    def _verify(self, level: int):
        """Re-establish the Schreier condition at ``level``.

        Failed sifts append the residue as a strong generator to every
        level it belongs to and recursively verify the deeper levels, so
        on return every level >= ``level`` satisfies the condition.
        """
        self._orbit(level)
        while True:
            t = self.trans[level]
            gens = self.gens[level]
            restart = False
            for p in t:
                up = t[p]
                for s in gens:
                    uq = t[s[p]]
                    sg = p_mul(p_mul(up, s), p_inv(uq))
                    if p_is_identity(sg):
                        continue
                    h, j = self.strip(sg, level + 1)
                    if p_is_identity(h):
                        continue
                    if j == len(self.base):
                        self._add_level(self._min_moved(h))
                    for k in range(level + 1, j + 1):
                        self.gens[k].append(h)
                        self._orbit(k)
                    for k in range(j, level, -1):
                        self._verify(k)
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                return

    def order(self) -> int:
        n = 1
        for t in self.trans:
            n *= len(t)
        return n

    def contains(self, g: Perm) -> bool:
        h, _ = self.strip(tuple(g))
        return p_is_identity(h)

    def level_group_gens(self, level: int) -> list[Perm]:
        """Generators of the stabilizer of base[0..level-1]."""
        if level >= len(self.base):
            return []
        return list(self.gens[level])


class PermutationGroup:
    """Immutable generator list; chains and derived data built on demand."""

    def __init__(self, generators, degree: int):
        self.degree = degree
        gens = []
        for g in generators:
            g = tuple(g)
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of 0..{degree - 1}: {g!r}")
            gens.append(g)
        self.generators = tuple(gens)
        self._chains: dict[tuple[int, ...], _Chain] = {}
        self._orbits = None

    @classmethod
    def from_cycles(cls, texts, degree: int | None = None) -> "PermutationGroup":
        perms = [parse_cycles(t) for t in texts]
        n = degree if degree is not None else max((len(p) for p in perms), default=1)
        perms = [p + tuple(range(len(p), n)) for p in perms]
        return cls(perms, n)

    def chain(self, prefix=()) -> _Chain:
        key = tuple(prefix)
        ch = self._chains.get(key)
        if ch is None:
            ch = _Chain(self.generators, self.degree, prefix=key)
            self._chains[key] = ch
        return ch

    def order(self) -> int:
        return self.chain().order()

    def __contains__(self, perm) -> bool:
        return self.chain().contains(tuple(perm))

    def orbits(self) -> list[list[int]]:
        if self._orbits is None:
            seen = [False] * self.degree
            orbits = []
            for start in range(self.degree):
                if seen[start]:
                    continue
                orbit = [start]
                seen[start] = True
                qi = 0
                while qi < len(orbit):
                    p = orbit[qi]
                    qi += 1
                    for g in self.generators:
                        q = g[p]
                        if not seen[q]:
                            seen[q] = True
                            orbit.append(q)
                orbits.append(orbit)
            self._orbits = orbits
        return self._orbits

    def is_transitive(self) -> bool:
        return self.degree == 0 or len(self.orbits()) == 1

    def orbit_of(self, point: int) -> list[int]:
        for orbit in self.orbits():
            if point in orbit:
                return orbit
        raise ValueError(f"point {point} out of range")

    def point_stabilizer(self, a: int) -> "PermutationGroup":
        self._check_point(a)
        gens = self.chain((a,)).level_group_gens(1)
        return PermutationGroup(gens, self.degree)

    def pair_stabilizer(self, a: int, b: int) -> "PermutationGroup":
        self._check_point(a)
        self._check_point(b)
        if a == b:
            raise ValueError("pair stabilizer needs two distinct points")
        gens = self.chain((a, b)).level_group_gens(2)
        return PermutationGroup(gens, self.degree)

    def _check_point(self, a: int):
        if not 0 <= a < self.degree:
            raise ValueError(f"point {a} out of range for degree {self.degree}")

    def rank(self) -> int:
        """Orbit count on ordered pairs (diagonal included); transitive only."""
        if not self.is_transitive():
            raise ValueError("rank is defined here for transitive groups only")
        if self.degree == 1:
            return 1
        return len(self.point_stabilizer(0).orbits())

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(
            i for i in range(self.degree) if all(g[i] == i for g in self.generators)
        )

    def orbit_partition(self) -> tuple[tuple[int, ...], ...]:
        """Orbits as a canonically sorted partition (generator-order independent)."""
        return tuple(sorted(tuple(sorted(o)) for o in self.orbits()))

    def normal_closure(self, subgroup_gens) -> "PermutationGroup":
        """Closure of ``subgroup_gens`` under conjugation by the group."""
        conjugators = list(self.generators) + [p_inv(g) for g in self.generators]
        gens = [tuple(g) for g in subgroup_gens if not p_is_identity(tuple(g))]
        closure = _Chain(gens, self.degree)
        full = self.order()
        queue = list(gens)
        qi = 0
        while qi < len(queue) and closure.order() < full:
            h = queue[qi]
            qi += 1
            for c in conjugators:
                conj = p_mul(p_mul(p_inv(c), h), c)
                if not closure.contains(conj):
                    gens.append(conj)
                    queue.append(conj)
                    closure = _Chain(gens, self.degree)
                    if closure.order() == full:
                        break
        return PermutationGroup(gens, self.degree)

    def normal_closure_is_full(self, subgroup_gens) -> bool:
        return self.normal_closure(subgroup_gens).order() == self.order()

    def elements(self, limit: int | None = None) -> list[Perm]:
        """All elements by breadth-first closure, sorted; ``limit`` guards size."""
        if limit is not None and self.order() > limit:
            raise ValueError(f"group order {self.order()} exceeds limit {limit}")
        ident = p_identity(self.degree)
        seen = {ident}
        queue = [ident]
        qi = 0
        while qi < len(queue):
            p = queue[qi]
            qi += 1
            for g in self.generators:
                q = p_mul(p, g)
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return sorted(seen)

    def conjugacy_class_representatives(self, limit: int | None = None) -> list[Perm]:
        """Smallest element of each class, identity first; needs full listing."""
        elems = self.elements(limit)
        elem_set = set(elems)
        reps = []
        assigned: set[Perm] = set()
        for e in elems:
            if e in assigned:
                continue
            cls = {e}
            queue = [e]
            qi = 0
            while qi < len(queue):
                x = queue[qi]
                qi += 1
                for g in self.generators:
                    y = p_mul(p_mul(p_inv(g), x), g)
                    if y not in cls:
                        cls.add(y)
                        queue.append(y)
            assert cls <= elem_set
            assigned |= cls
            reps.append(e)
        return reps

    def centralizer_elements(self, x: Perm, limit: int | None = None) -> list[Perm]:
        return [g for g in self.elements(limit) if p_mul(g, x) == p_mul(x, g)]

    def _block_system(self, seed: int) -> list[int] | None:
        """Minimal block system merging 0 with ``seed``; None if it is trivial."""
        parent = list(range(self.degree))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        queue = [(0, seed)]
        qi = 0
        while qi < len(queue):
            a, b = queue[qi]
            qi += 1
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            if ra > rb:
                ra, rb = rb, ra
            parent[rb] = ra
            for g in self.generators:
                queue.append((g[ra], g[rb]))
        roots = {find(i) for i in range(self.degree)}
        if len(roots) in (1, self.degree):
            return None
        return [find(i) for i in range(self.degree)]

    def is_primitive(self) -> bool:
        if not self.is_transitive() or self.degree <= 2:
            return self.is_transitive()
        for seed in range(1, self.degree):
            if self._block_system(seed) is not None:
                return False
        return True

    def equals_subgroup(self, other: "PermutationGroup") -> bool:
        """Equality as subgroups of Sym(degree): same order, mutual membership."""
        if self.degree != other.degree or self.order() != other.order():
            return False
        return all(g in other for g in self.generators) and all(
            g in self for g in other.generators
        )


def perm_of_word(gen_perms, word: Word, degree: int) -> Perm:
    """Image of a word under generator assignments (left-to-right action)."""
    p = p_identity(degree)
    for x in word:
        g = gen_perms[abs(x) - 1]
        p = p_mul(p, g if x > 0 else p_inv(g))
    return p


def perm_image(table: CosetTable) -> PermutationGroup:
    """The coset action: one generator permutation per presentation generator."""
    gens = [tuple(table.columns[2 * g]) for g in range(table.generator_count)]
    return PermutationGroup(gens, table.index)


def group_order(group: PermutationGroup) -> int:
    return group.order()


_FACTORIALS = {}


def _factorial(n: int) -> int:
    if n not in _FACTORIALS:
        f = 1
        for k in range(2, n + 1):
            f *= k
        _FACTORIALS[n] = f
    return _FACTORIALS[n]


def name_group(group: PermutationGroup) -> str:
    """Closed-vocabulary recognizer for the group labels used in reports.

    Covers A_n (order n!/2, n >= 5), S_n (order n!), PSL(2,7), SL(2,7)
    and PSL(2,13), each determined by order within that vocabulary (with
    a generator-parity check when the degree equals n); anything else is
    reported as ``order=<n>`` with transitivity and primitivity flags.
    """
    order = group.order()
    if order == 1:
        return "1"
    n = 5
    while _factorial(n) // 2 < order:
        n += 1
    if _factorial(n) // 2 == order:
        if group.degree != n or all(p_parity(g) == 0 for g in group.generators):
            return f"A_{n}"
    n = 2
    while _factorial(n) < order:
        n += 1
    if _factorial(n) == order:
        return f"S_{n}"
    special = {168: "PSL(2,7)", 336: "SL(2,7)", 1092: "PSL(2,13)"}
    if order in special:
        return special[order]
    flags = ["transitive" if group.is_transitive() else "intransitive"]
    if group.is_transitive():
        flags.append("primitive" if group.is_primitive() else "imprimitive")
    return f"order={order} ({', '.join(flags)})"
