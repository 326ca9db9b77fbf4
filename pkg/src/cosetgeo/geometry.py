"""Point/line incidence geometries from two-point stabilizer subgroups.

Points are the coset labels 0..d-1 of a transitive permutation group.
Unordered pairs are grouped by *equal* (not merely conjugate) two-point
stabilizers; each equality class is merged into lines:

* components that are cliques become lines covering all their pairs;
* otherwise, maximum-size cliques are used when they partition the class
  exactly (this resolves the star/triangle ambiguity in edge classes of
  a triangular graph);
* classes that still do not split are kept pair-by-pair and flagged as
  *unmerged* -- their union is what complete multipartite collinearity
  looks like.

A line is *contextual* when some pair of its points has non-commuting
coset-representative images.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

import networkx as nx

from .permgrp import PermutationGroup, Perm, p_mul, perm_of_word

__all__ = [
    "IncidenceGeometry",
    "GeometryName",
    "build_geometry",
    "axiom_ii_holds",
    "contextuality",
    "reference_model",
    "isomorphic",
    "recognize",
    "recognize_all",
    "binomial_filtration",
    "geometry_to_dot",
]


@dataclass(frozen=True)
class IncidenceGeometry:
    """Lines are sorted point tuples; parallel tuples carry annotations.

    ``unmerged`` marks lines coming from stabilizer classes that could not
    be partitioned into cliques (kept as bare pairs), and
    ``stabilizer_triangle`` records whether any class contained three
    mutually-paired points -- the obstruction tested by the no-geometry
    axiom.  Reference models built without stabilizer data leave the
    annotations empty.
    """

    point_count: int
    lines: tuple[tuple[int, ...], ...]
    stabilizer_orders: tuple[int, ...] | None = None
    contextual: tuple[bool, ...] | None = None
    unmerged: frozenset[int] = frozenset()
    stabilizer_triangle: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(tuple(sorted(l)) for l in self.lines))
        for line in self.lines:
            if len(line) < 2:
                raise ValueError("every line needs at least 2 points")
            if any(p < 0 or p >= self.point_count for p in line):
                raise ValueError("line point out of range")

    @property
    def line_sizes(self) -> list[int]:
        return sorted(len(l) for l in self.lines)

    def point_degrees(self) -> list[int]:
        deg = [0] * self.point_count
        for line in self.lines:
            for p in line:
                deg[p] += 1
        return deg

    def core_lines(self) -> tuple[tuple[int, ...], ...]:
        """Lines of size >= 3; the named geometries live here."""
        return tuple(l for l in self.lines if len(l) >= 3)

    def core_stabilizer_orders(self) -> tuple[int, ...]:
        """Distinct stabilizer orders occurring on size->=3 lines."""
        if self.stabilizer_orders is None:
            return ()
        return tuple(
            sorted(
                {
                    o
                    for line, o in zip(self.lines, self.stabilizer_orders)
                    if len(line) >= 3
                }
            )
        )

    def stabilizer_type_subgeometry(self, order: int) -> "IncidenceGeometry":
        """The lines whose common stabilizer has the given order.

        This is the per-selected-stabilizer-type geometry: distinct types
        on one coset space yield distinct named geometries (for example a
        projective space and an embedded quadrangle).
        """
        if self.stabilizer_orders is None:
            raise ValueError("geometry carries no stabilizer annotations")
        keep = [i for i, o in enumerate(self.stabilizer_orders) if o == order]
        return IncidenceGeometry(
            point_count=self.point_count,
            lines=tuple(self.lines[i] for i in keep),
            stabilizer_orders=tuple(self.stabilizer_orders[i] for i in keep),
            contextual=tuple(self.contextual[i] for i in keep)
            if self.contextual is not None
            else None,
            unmerged=frozenset(k for k, i in enumerate(keep) if i in self.unmerged),
            stabilizer_triangle=self.stabilizer_triangle,
        )

    def is_contextual(self) -> bool:
        if self.contextual is None:
            raise ValueError("geometry has no contextuality annotation")
        return any(self.contextual)

    def config_symbol(self) -> str:
        """Configuration symbol like [28_6,56_3] when degrees are uniform."""
        core = self.core_lines() or self.lines
        deg = [0] * self.point_count
        for line in core:
            for p in line:
                deg[p] += 1
        degs = sorted(set(deg))
        sizes = sorted({len(l) for l in core})
        d = f"{self.point_count}_{degs[0]}" if len(degs) == 1 else f"{self.point_count}_*"
        s = f"{len(core)}_{sizes[0]}" if len(sizes) == 1 else f"{len(core)}_*"
        return f"[{d},{s}]"

    def to_json(self) -> dict:
        data = {
            "points": self.point_count,
            "lines": [[p + 1 for p in line] for line in self.lines],
        }
        if self.stabilizer_orders is not None:
            data["stabilizer_orders"] = list(self.stabilizer_orders)
        if self.contextual is not None:
            data["contextual"] = list(self.contextual)
        if self.unmerged:
            data["unmerged"] = sorted(self.unmerged)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "IncidenceGeometry":
        return cls(
            point_count=data["points"],
            lines=tuple(tuple(p - 1 for p in line) for line in data["lines"]),
            stabilizer_orders=tuple(data["stabilizer_orders"])
            if "stabilizer_orders" in data
            else None,
            contextual=tuple(data["contextual"]) if "contextual" in data else None,
            unmerged=frozenset(data.get("unmerged", ())),
        )


@dataclass(frozen=True)
class GeometryName:
    """Recognition result; ``bijection`` certifies the reference isomorphism."""

    kind: str  # complete | multipartite | fano | pg32 | gq22 | pentagram | grassmannian | unknown
    params: tuple[int, ...] = ()
    bijection: tuple[int, ...] | None = None

    def __str__(self) -> str:
        if self.kind == "complete":
            return f"K_{self.params[0]}"
        if self.kind == "multipartite":
            m, k = self.params
            return "K(" + ",".join([str(m)] * k) + ")"
        if self.kind == "fano":
            return "Fano plane"
        if self.kind == "pg32":
            return "PG(3,2)"
        if self.kind == "gq22":
            return "GQ(2,2)"
        if self.kind == "pentagram":
            return "Mermin pentagram"
        if self.kind == "grassmannian":
            return f"Gr(2,{self.params[0]})"
        return "unknown"


class GeometryError(ValueError):
    pass


# -- construction -----------------------------------------------------------


def _stabilizer_classes(group: PermutationGroup):
    """Group unordered point pairs by equality of their stabilizers.

    Returns (classes, orders): classes is a list of pair lists, orders the
    common stabilizer order per class.
    """
    d = group.degree
    pairs = list(combinations(range(d), 2))
    keyed: dict = {}
    for a, b in pairs:
        stab = group.pair_stabilizer(a, b)
        order = stab.order()
        if order == 1:
            key = (1, (), ())
            bucket = keyed.setdefault(key, [])
            if not bucket:
                bucket.append((stab, []))
            bucket[0][1].append((a, b))
            continue
        key = (order, stab.fixed_points(), stab.orbit_partition())
        bucket = keyed.setdefault(key, [])
        for known, members in bucket:
            if known.equals_subgroup(stab):
                members.append((a, b))
                break
        else:
            bucket.append((stab, [(a, b)]))
    classes = []
    orders = []
    for bucket in keyed.values():
        for stab, members in bucket:
            classes.append(sorted(members))
            orders.append(stab.order())
    order_of_class = list(zip(classes, orders))
    order_of_class.sort(key=lambda t: t[0])
    return [c for c, _ in order_of_class], [o for _, o in order_of_class]


def _merge_class(pairs):
    """Turn one equal-stabilizer pair class into lines.

    Returns (lines, unmerged, has_triangle).
    """
    graph = nx.Graph(pairs)
    has_triangle = any(t > 0 for t in nx.triangles(graph).values())
    components = [graph.subgraph(c) for c in nx.connected_components(graph)]
    if all(
        comp.number_of_edges() == comp.number_of_nodes() * (comp.number_of_nodes() - 1) // 2
        for comp in components
    ):
        return [tuple(sorted(comp.nodes())) for comp in components], False, has_triangle
    cliques = list(nx.find_cliques(graph))
    top = max(len(c) for c in cliques)
    big = [tuple(sorted(c)) for c in cliques if len(c) == top]
    if top > 2:
        covered = set()
        for cl in big:
            for pair in combinations(cl, 2):
                if pair in covered:
                    covered = None
                    break
                covered.add(pair)
            if covered is None:
                break
        if covered is not None and covered == set(pairs):
            return sorted(big), False, has_triangle
    return [tuple(p) for p in pairs], True, has_triangle


def build_geometry(group: PermutationGroup, reps=None) -> IncidenceGeometry:
    """Equal-stabilizer geometry of a transitive group; see module docstring.

    When breadth-first coset representatives are supplied, per-line
    contextuality is annotated as well.
    """
    if not group.is_transitive():
        raise GeometryError("geometry construction needs a transitive group")
    d = group.degree
    if d < 2:
        geom = IncidenceGeometry(d, (), (), stabilizer_triangle=False)
        return geom

    lines: list[tuple[int, ...]] = []
    orders: list[int] = []
    unmerged_flags: list[bool] = []
    triangle = False

    shortcut = _two_transitive_complete(group)
    if shortcut is not None:
        for a, b in combinations(range(d), 2):
            lines.append((a, b))
            orders.append(shortcut)
            unmerged_flags.append(False)
    else:
        classes, class_orders = _stabilizer_classes(group)
        for pairs, order in zip(classes, class_orders):
            class_lines, unmerged, has_tri = _merge_class(pairs)
            triangle = triangle or has_tri
            for line in class_lines:
                lines.append(line)
                orders.append(order)
                unmerged_flags.append(unmerged)

    sort_order = sorted(range(len(lines)), key=lambda i: lines[i])
    lines = [lines[i] for i in sort_order]
    orders = [orders[i] for i in sort_order]
    unmerged = frozenset(i for i, k in enumerate(sort_order) if unmerged_flags[k])
    geom = IncidenceGeometry(
        point_count=d,
        lines=tuple(lines),
        stabilizer_orders=tuple(orders),
        unmerged=unmerged,
        stabilizer_triangle=triangle,
    )
    _check_pair_cover(geom)
    if reps is not None:
        geom = contextuality(geom, reps, group)
    return geom


def _two_transitive_complete(group: PermutationGroup) -> int | None:
    """Order of the common pair-stabilizer if the geometry is forced complete.

    For a 2-transitive group whose pair stabilizer fixes exactly its own
    pair, conjugacy moves the fixed pair with the stabilizer, so distinct
    pairs have distinct stabilizers and every line is a bare pair.
    """
    if group.degree < 3 or group.rank() != 2:
        return None
    stab = group.pair_stabilizer(0, 1)
    if stab.fixed_points() == (0, 1):
        return stab.order()
    return None


def _check_pair_cover(geom: IncidenceGeometry) -> None:
    seen = set()
    for line in geom.lines:
        for pair in combinations(line, 2):
            if pair in seen:
                raise GeometryError(f"pair {pair} lies on two lines")
            seen.add(pair)
    if len(seen) != geom.point_count * (geom.point_count - 1) // 2:
        raise GeometryError("some pair lies on no line")


def axiom_ii_holds(geom: IncidenceGeometry) -> bool:
    """No triple of points with equal pairwise stabilizers.

    Equivalent to every line having exactly two points when the class
    merge succeeded; unmerged classes keep their own triangle flag.
    """
    if geom.stabilizer_triangle is not None:
        return not geom.stabilizer_triangle
    return all(len(l) == 2 for l in geom.lines)


def contextuality(geom: IncidenceGeometry, reps, group: PermutationGroup) -> IncidenceGeometry:
    """Annotate each line: contextual iff some pair of representative
    images fails to commute."""
    images: list[Perm] = [
        perm_of_word(group.generators, w, group.degree) for w in reps
    ]
    flags = []
    for line in geom.lines:
        flag = False
        for a, b in combinations(line, 2):
            pa, pb = images[a], images[b]
            if p_mul(pa, pb) != p_mul(pb, pa):
                flag = True
                break
        flags.append(flag)
    return replace(geom, contextual=tuple(flags))


# -- reference models ---------------------------------------------------------


def reference_complete(d: int) -> IncidenceGeometry:
    return IncidenceGeometry(d, tuple(combinations(range(d), 2)))


def reference_multipartite(m: int, k: int) -> IncidenceGeometry:
    """Complete multipartite K(m^k): lines are the cross-part pairs."""
    parts = [range(i * m, (i + 1) * m) for i in range(k)]
    lines = []
    for i, j in combinations(range(k), 2):
        for a in parts[i]:
            for b in parts[j]:
                lines.append((a, b))
    return IncidenceGeometry(m * k, tuple(lines))


def reference_pg(n: int) -> IncidenceGeometry:
    """Point-line truncation of PG(n,2): points are non-zero vectors of
    F_2^(n+1), lines the triples {u, v, u^v}."""
    d = (1 << (n + 1)) - 1
    lines = []
    for u in range(1, d + 1):
        for v in range(u + 1, d + 1):
            w = u ^ v
            if w > v:
                lines.append((u - 1, v - 1, w - 1))
    return IncidenceGeometry(d, tuple(lines))


def reference_gq22() -> IncidenceGeometry:
    """The generalized quadrangle of order two: symplectic lines in F_2^4."""

    def form(u, v):
        u1, u2, u3, u4 = u
        v1, v2, v3, v4 = v
        return (u1 * v2 + u2 * v1 + u3 * v4 + u4 * v3) % 2

    vecs = [tuple((x >> k) & 1 for k in range(4)) for x in range(1, 16)]
    idx = {v: i for i, v in enumerate(vecs)}
    lines = set()
    for u in vecs:
        for v in vecs:
            if u >= v or form(u, v) != 0:
                continue
            w = tuple((a + b) % 2 for a, b in zip(u, v))
            lines.add(tuple(sorted((idx[u], idx[v], idx[w]))))
    return IncidenceGeometry(15, tuple(sorted(lines)))


def reference_grassmannian(n: int) -> IncidenceGeometry:
    """Binomial configuration on the 2-subsets of an n-set: lines are the
    triangles {{a,b},{a,c},{b,c}}."""
    pairs = list(combinations(range(n), 2))
    idx = {p: i for i, p in enumerate(pairs)}
    lines = []
    for a, b, c in combinations(range(n), 3):
        lines.append(tuple(sorted((idx[(a, b)], idx[(a, c)], idx[(b, c)]))))
    return IncidenceGeometry(len(pairs), tuple(lines))


def reference_pentagram() -> IncidenceGeometry:
    """Ten points on five 4-point lines, every point on exactly two."""
    pairs = list(combinations(range(5), 2))
    idx = {p: i for i, p in enumerate(pairs)}
    lines = []
    for k in range(5):
        lines.append(tuple(sorted(idx[tuple(sorted((k, j)))] for j in range(5) if j != k)))
    return IncidenceGeometry(10, tuple(lines))


def reference_model(name) -> IncidenceGeometry:
    """Build the reference geometry for a tag or GeometryName."""
    if isinstance(name, GeometryName):
        kind, params = name.kind, name.params
    else:
        kind, params = name, ()
    if kind == "complete":
        return reference_complete(*params)
    if kind == "multipartite":
        return reference_multipartite(*params)
    if kind == "fano":
        return reference_pg(2)
    if kind == "pg32":
        return reference_pg(3)
    if kind == "pg":
        return reference_pg(*params)
    if kind == "gq22":
        return reference_gq22()
    if kind == "grassmannian":
        return reference_grassmannian(*params)
    if kind == "pentagram":
        return reference_pentagram()
    raise GeometryError(f"unsupported reference tag {kind!r}")


# -- isomorphism and recognition ----------------------------------------------


def _parameters(geom: IncidenceGeometry):
    return (
        geom.point_count,
        len(geom.lines),
        tuple(geom.line_sizes),
        tuple(sorted(geom.point_degrees())),
    )


def _incidence_graph(geom: IncidenceGeometry) -> nx.Graph:
    g = nx.Graph()
    deg = geom.point_degrees()
    for p in range(geom.point_count):
        g.add_node(("p", p), kind="p", deg=deg[p])
    for i, line in enumerate(geom.lines):
        g.add_node(("l", i), kind="l", deg=len(line))
        for p in line:
            g.add_edge(("l", i), ("p", p))
    return g


def isomorphic(g1: IncidenceGeometry, g2: IncidenceGeometry):
    """Point bijection mapping lines onto lines, or None.

    Complete search (VF2 on the incidence graph with degree-typed nodes),
    so absence of a result certifies non-isomorphism.
    """
    if _parameters(g1) != _parameters(g2):
        return None
    matcher = nx.algorithms.isomorphism.GraphMatcher(
        _incidence_graph(g1),
        _incidence_graph(g2),
        node_match=lambda a, b: a["kind"] == b["kind"] and a["deg"] == b["deg"],
    )
    for mapping in matcher.isomorphisms_iter():
        bijection = [0] * g1.point_count
        for (kind, a), (kind2, b) in mapping.items():
            if kind == "p":
                bijection[a] = b
        lines2 = set(g2.lines)
        mapped = {tuple(sorted(bijection[p] for p in line)) for line in g1.lines}
        if mapped == lines2:
            return tuple(bijection)
        break
    return None


def _core_geometry(geom: IncidenceGeometry) -> IncidenceGeometry:
    return IncidenceGeometry(geom.point_count, geom.core_lines())


def _multipartite_parts(graph: nx.Graph, d: int):
    """Part decomposition when the graph is complete multipartite on d nodes."""
    if graph.number_of_nodes() != d:
        return None
    comp = nx.complement(graph)
    parts = [sorted(c) for c in nx.connected_components(comp)]
    sizes = {len(p) for p in parts}
    if len(sizes) != 1 or len(parts) < 2:
        return None
    m = sizes.pop()
    if m < 2 or len(parts) < 2:
        return None
    # complement components must be cliques (then graph is multipartite)
    for part in parts:
        sub = comp.subgraph(part)
        if sub.number_of_edges() != len(part) * (len(part) - 1) // 2:
            return None
    return m, sorted(parts)


def recognize(geom: IncidenceGeometry) -> GeometryName:
    """Parameter match, then certification by explicit isomorphism."""
    d = geom.point_count
    core = geom.core_lines()
    n_pairs = d * (d - 1) // 2

    if core:
        core_geom = _core_geometry(geom)
        candidates: list[GeometryName] = []
        pts, nlines, sizes, _ = _parameters(core_geom)
        if (pts, nlines, set(sizes)) == (7, 7, {3}):
            candidates.append(GeometryName("fano"))
        if (pts, nlines, set(sizes)) == (15, 35, {3}):
            candidates.append(GeometryName("pg32"))
        if (pts, nlines, set(sizes)) == (15, 15, {3}):
            candidates.append(GeometryName("gq22"))
        if (pts, nlines, set(sizes)) == (10, 5, {4}):
            candidates.append(GeometryName("pentagram"))
        for n in range(3, 24):
            if n * (n - 1) // 2 == pts and set(sizes) == {3} and nlines == n * (n - 1) * (n - 2) // 6:
                candidates.append(GeometryName("grassmannian", (n,)))
        for cand in candidates:
            bij = isomorphic(core_geom, reference_model(cand))
            if bij is not None:
                return replace(cand, bijection=bij)

    unmerged_edges = [geom.lines[i] for i in sorted(geom.unmerged)]
    if unmerged_edges:
        mp = _multipartite_parts(nx.Graph(unmerged_edges), d)
        if mp is not None:
            m, parts = mp
            part_of = {}
            for k, part in enumerate(parts):
                for p in part:
                    part_of[p] = k
            others_ok = all(
                len({part_of[p] for p in geom.lines[i]}) == 1
                for i in range(len(geom.lines))
                if i not in geom.unmerged
            )
            if others_ok:
                return GeometryName("multipartite", (m, len(parts)))
        return GeometryName("unknown")

    if not core:
        if len(geom.lines) == n_pairs and all(len(l) == 2 for l in geom.lines):
            return GeometryName("complete", (d,))
        if all(len(l) == 2 for l in geom.lines):
            mp = _multipartite_parts(nx.Graph(list(geom.lines)), d)
            if mp is not None:
                m, parts = mp
                return GeometryName("multipartite", (m, len(parts)))
    return GeometryName("unknown")


def recognize_all(geom: IncidenceGeometry) -> list[GeometryName]:
    """Recognize the full geometry plus each stabilizer-type subgeometry.

    A coset space with several two-point-stabilizer types hosts one named
    geometry per selected type; duplicates and unrecognized extras are
    dropped, with the full-geometry name first.
    """
    names = [recognize(geom)]
    orders = geom.core_stabilizer_orders()
    if len(orders) > 1:
        for order in orders:
            sub = geom.stabilizer_type_subgeometry(order)
            name = recognize(sub)
            if name.kind != "unknown" and all(
                (name.kind, name.params) != (k.kind, k.params) for k in names
            ):
                names.append(name)
    return names


def binomial_filtration(geom: IncidenceGeometry, name: GeometryName) -> list[int]:
    """Cumulative line counts of the nested 2-subset configurations.

    Needs a grassmannian recognition with its certifying bijection; level
    i counts the core lines living on the 2-subsets of the first i symbols.
    """
    if name.kind != "grassmannian" or name.bijection is None:
        raise GeometryError("filtration needs a certified grassmannian geometry")
    n = name.params[0]
    pairs = list(combinations(range(n), 2))
    core = [tuple(sorted(name.bijection[p] for p in line)) for line in geom.core_lines()]
    counts = []
    for i in range(3, n + 1):
        allowed = {k for k, (a, b) in enumerate(pairs) if b < i}
        counts.append(sum(1 for line in core if set(line) <= allowed))
    return counts


# -- export -------------------------------------------------------------------


def geometry_to_dot(geom: IncidenceGeometry, name: str = "geometry") -> str:
    """DOT text: points as nodes, size->=3 lines as labelled chains."""
    out = [f"graph {name} {{"]
    for p in range(geom.point_count):
        out.append(f"  {p + 1};")
    for i, line in enumerate(geom.lines):
        if len(line) == 2:
            out.append(f"  {line[0] + 1} -- {line[1] + 1};")
        else:
            out.append(f"  // line {i}: {{{','.join(str(p + 1) for p in line)}}}")
            chain = " -- ".join(str(p + 1) for p in line)
            out.append(f"  {chain} [color=\"/dark28/{i % 8 + 1}\"];")
    out.append("}")
    return "\n".join(out) + "\n"
