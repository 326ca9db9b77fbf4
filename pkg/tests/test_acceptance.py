"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -rA`` (or ``-s``) to see the
per-criterion lines.  The subgroup-index stretch run is enabled by
setting ``COSETGEO_STRETCH=1``.
"""

import os
import time
from collections import Counter
from itertools import combinations

import numpy as np
import pytest

from cosetgeo.coset import coset_representatives
from cosetgeo.fpgroup import parse_presentation
from cosetgeo.geometry import (
    GeometryName,
    IncidenceGeometry,
    axiom_ii_holds,
    binomial_filtration,
    build_geometry,
    isomorphic,
    recognize,
    recognize_all,
    reference_model,
)
from cosetgeo.lowindex import eta_sequence, low_index_subgroups
from cosetgeo.mic import (
    Fiducial,
    born_probabilities,
    displacement_operators,
    find_fiducials,
    gram_rank,
    is_sic,
    pairwise_products,
    reconstruct_state,
    _displacement_equivalent,
)
from cosetgeo.permgrp import PermutationGroup, name_group, perm_image

from conftest import ENUMERATION_SECONDS

TOL = 1e-8

ETA_SIGMA_13 = [0, 0, 0, 0, 0, 0, 2, 1, 0, 3, 0, 0, 0]
ETA_SIGMA_14_TAIL = 12
ETA_WBAR_16 = [0, 0, 0, 0, 1, 1, 2, 0, 0, 1, 0, 5, 4, 9, 7, 1]
ETA_Q_16 = [0, 0, 0, 0, 0, 2, 2, 1, 0, 1, 0, 0, 0, 2, 2, 3]

BUDGET_SIGMA = 30 * 60
BUDGET_WBAR = 2 * 60 * 60
BUDGET_Q = 2 * 60 * 60
BUDGET_G28 = 5 * 60

G28_1 = "(2,4,8,6,3)(5,10,15,13,9)(11,12,18,25,17)(14,20,19,24,21)(16,22,26,28,23)"
G28_2 = "(1,2,5,11,6,7,3)(4,8,12,19,22,14,9)(10,16,24,27,21,26,17)(13,20,18,25,28,23,15)"

# the 56 three-point lines of the 28-point configuration, 1-based labels
LINES_28 = [
    (1, 7, 27),
    (1, 15, 23), (15, 17, 27), (7, 17, 23),
    (1, 5, 26), (5, 18, 27), (5, 15, 24), (23, 24, 26), (17, 18, 24), (7, 18, 26),
    (12, 14, 17), (1, 9, 22), (5, 8, 9), (9, 14, 15), (7, 12, 22), (8, 12, 18),
    (8, 14, 24), (8, 22, 26), (14, 22, 23), (9, 12, 27),
    (3, 10, 15), (3, 6, 24), (3, 17, 25), (3, 23, 28), (1, 10, 28), (3, 14, 19),
    (7, 25, 28), (6, 8, 19), (19, 22, 28), (5, 6, 10), (12, 19, 25), (10, 25, 27),
    (9, 10, 19), (6, 18, 25), (6, 26, 28),
    (4, 11, 12), (11, 21, 25), (6, 20, 21), (2, 3, 21), (2, 4, 14), (7, 11, 16),
    (2, 16, 23), (1, 13, 16), (2, 11, 17), (4, 19, 21), (16, 20, 26), (2, 13, 15),
    (11, 13, 27), (16, 21, 28), (2, 20, 24), (5, 13, 20), (11, 18, 20), (4, 9, 13),
    (4, 8, 20), (4, 16, 22), (10, 13, 21),
]

# unit fiducial of a dimension-5 symmetric measurement, found by driving
# all pairwise overlaps to 1/(d+1) with least squares (residual < 1e-15)
SIC5 = [
    complex(-2.4175144517106151e-01, -3.3866890288011525e-01),
    complex(+7.0192929752237787e-01, 0.0),
    complex(-2.2738849062835725e-01, -8.1873259335095844e-02),
    complex(+1.2994783948182154e-01, +1.5194771443597960e-01),
    complex(+4.4690622174684874e-01, -1.8985888983841229e-01),
]


def check(label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" - {detail}" if detail else ""
    print(f"acceptance {label}: {status}{suffix}")
    assert ok, f"criterion {label}: {detail}"


def analyzed(records, index):
    """(record, image group, annotated geometry) for every class at ``index``."""
    out = []
    for rec in records:
        if rec.index != index:
            continue
        group = perm_image(rec.table)
        geom = build_geometry(group, coset_representatives(rec.table))
        out.append((rec, group, geom))
    return out


# -- criterion 1: subgroup-class counts by index ------------------------------


def test_criterion_1a_sigma257(sigma257_records_13):
    eta = eta_sequence(sigma257_records_13, 13)
    seconds = ENUMERATION_SECONDS.get("sigma257_13", 0.0)
    check("1a", eta == ETA_SIGMA_13, f"eta={eta} in {seconds:.1f}s")
    check("1a-budget", seconds <= BUDGET_SIGMA, f"{seconds:.1f}s <= {BUDGET_SIGMA}s")


@pytest.mark.skipif(
    not os.environ.get("COSETGEO_STRETCH"),
    reason="stretch run; set COSETGEO_STRETCH=1 to enable",
)
def test_criterion_1a_stretch_index_14(sigma257):
    start = time.monotonic()
    records = low_index_subgroups(sigma257, 14)
    eta = eta_sequence(records, 14)
    check(
        "1a-stretch",
        eta == ETA_SIGMA_13 + [ETA_SIGMA_14_TAIL],
        f"eta={eta} in {time.monotonic() - start:.1f}s",
    )


def test_criterion_1b_wbar(wbar_records_16):
    eta = eta_sequence(wbar_records_16, 16)
    seconds = ENUMERATION_SECONDS.get("wbar_16", 0.0)
    check("1b", eta == ETA_WBAR_16, f"eta={eta} in {seconds:.1f}s")
    check("1b-budget", seconds <= BUDGET_WBAR, f"{seconds:.1f}s <= {BUDGET_WBAR}s")


def test_criterion_1c_q(q_records_16):
    eta = eta_sequence(q_records_16, 16)
    seconds = ENUMERATION_SECONDS.get("q_16", 0.0)
    check("1c", eta == ETA_Q_16, f"eta={eta} in {seconds:.1f}s")
    check("1c-budget", seconds <= BUDGET_Q, f"{seconds:.1f}s <= {BUDGET_Q}s")


# -- criterion 2: closure fullness for every enumerated subgroup ---------------


def test_criterion_2_normal_closures(
    sigma257_records_13, wbar_records_16, q_records_16
):
    failures = []
    total = 0
    for name, records in [
        ("sigma257", sigma257_records_13),
        ("wbar", wbar_records_16),
        ("q", q_records_16),
    ]:
        for rec in records:
            total += 1
            if rec.index == 1:
                continue
            group = perm_image(rec.table)
            stab = group.chain((0,)).level_group_gens(1)
            if not group.normal_closure_is_full(stab):
                failures.append((name, rec.index, rec.class_id))
    check("2", not failures, f"{total} records checked, failures={failures}")


# -- criterion 3: named rows of the middle-level group -------------------------


def test_criterion_3_q_rows(q_records_16):
    expected = {
        6: ("A_6", 360, "complete", (6,)),
        7: ("PSL(2,7)", 168, "fano", ()),
        8: ("PSL(2,7)", 168, "complete", (8,)),
        10: ("A_6", 360, "complete", (10,)),
    }
    for index, (label, order, kind, params) in expected.items():
        rows = analyzed(q_records_16, index)
        hits = []
        for rec, group, geom in rows:
            name = recognize(geom)
            if (
                name_group(group) == label
                and group.order() == order
                and (name.kind, name.params) == (kind, params)
            ):
                hits.append((rec, group, geom, name))
        check(
            f"3-d{index}",
            bool(hits),
            f"{label} of order {order} with {kind}{params} geometry",
        )
        if index == 7:
            rec, group, geom, name = hits[0]
            check("3-fano-certified", name.bijection is not None, "explicit bijection")
            ref = reference_model("fano")
            mapped = {
                tuple(sorted(name.bijection[p] for p in line)) for line in geom.lines
            }
            check("3-fano-lines", mapped == set(ref.lines), "maps lines onto lines")
            check("3-fano-contextual", geom.is_contextual(), "contextual flag")


# -- criterion 4: the five-line geometry at index 10 ----------------------------


def test_criterion_4_pentagram(wbar_records_16):
    rows = analyzed(wbar_records_16, 10)
    check("4-exists", len(rows) == 1, f"{len(rows)} classes at index 10")
    rec, group, geom = rows[0]
    core = geom.core_lines()
    ok_shape = geom.point_count == 10 and len(core) == 5 and all(len(l) == 4 for l in core)
    check("4-shape", ok_shape, "10 points, 5 lines of size 4")
    name = recognize(geom)
    check("4-certified", name.kind == "pentagram" and name.bijection is not None, str(name))
    check("4-contextual", geom.is_contextual(), "contextual flag")


# -- criterion 5: the index-15 geometries --------------------------------------


def test_criterion_5_index_15(q_records_16):
    rows = analyzed(q_records_16, 15)
    check("5-count", len(rows) == 2, f"{len(rows)} classes at index 15")
    pg_hits = 0
    gq_hits = 0
    for rec, group, geom in rows:
        names = recognize_all(geom)
        kinds = {(n.kind, n.params) for n in names}
        full = recognize(geom)
        if full.kind == "pg32" and full.bijection is not None:
            core = geom.core_lines()
            if geom.point_count == 15 and len(core) == 35 and geom.is_contextual():
                pg_hits += 1
            # every line missing the identity coset shows a non-commuting pair
            bad = [
                line
                for line, flag in zip(geom.lines, geom.contextual)
                if len(line) >= 3 and 0 not in line and not flag
            ]
            check(
                f"5-noncommuting-c{rec.class_id}",
                not bad,
                "all lines avoiding the identity are contextual",
            )
        if ("gq22", ()) in kinds:
            order = next(
                o
                for o in geom.core_stabilizer_orders()
                if recognize(geom.stabilizer_type_subgeometry(o)).kind == "gq22"
            )
            sub = geom.stabilizer_type_subgeometry(order)
            if len(sub.lines) == 15 and sub.is_contextual():
                gq_hits += 1
    check("5-pg32", pg_hits > 0, f"{pg_hits} record(s) certify the projective space")
    check("5-gq22", gq_hits > 0, f"{gq_hits} record(s) certify the quadrangle")


# -- criterion 6: the 28-point configuration from explicit generators -----------


def test_criterion_6_grassmannian_from_generators():
    start = time.monotonic()
    group = PermutationGroup.from_cycles([G28_1, G28_2])
    check("6-order", group.order() == 20160, f"order={group.order()}")
    geom = build_geometry(group)
    core = geom.core_lines()
    ok = geom.point_count == 28 and len(core) == 56 and all(len(l) == 3 for l in core)
    check("6-config", ok, f"{geom.config_symbol()}")
    name = recognize(geom)
    check(
        "6-reference",
        name.kind == "grassmannian" and name.params == (8,) and name.bijection is not None,
        str(name),
    )
    published = IncidenceGeometry(
        28, tuple(tuple(p - 1 for p in line) for line in LINES_28)
    )
    core_geom = IncidenceGeometry(28, core)
    bijection = isomorphic(core_geom, published)
    check("6-published-lines", bijection is not None, "bijection onto the printed lines")
    filtration = binomial_filtration(geom, name)
    check("6-filtration", filtration == [1, 4, 10, 20, 35, 56], f"{filtration}")
    seconds = time.monotonic() - start
    check("6-budget", seconds <= BUDGET_G28, f"{seconds:.1f}s <= {BUDGET_G28}s")


# -- criterion 7: fiducial verification -----------------------------------------


def test_criterion_7_gram_ranks():
    f5 = Fiducial.from_vector([0, 1, -1, -1, 1])
    w6 = np.exp(2j * np.pi / 6)
    f6 = Fiducial.from_vector([1, w6 - 1, 0, 0, -w6, 0])
    f7 = Fiducial.from_vector([1, 1, 0, -1, 0, -1, 0])
    ranks = (gram_rank(f5, TOL), gram_rank(f6, TOL), gram_rank(f7, TOL))
    check("7-ranks", ranks == (25, 36, 49), f"gram ranks {ranks}")


def test_criterion_7_d6_products():
    w6 = np.exp(2j * np.pi / 6)
    f6 = Fiducial.from_vector([1, w6 - 1, 0, 0, -w6, 0])
    pp, _ = pairwise_products(f6, TOL)
    check("7-d6", pp == 2, f"pp={pp}")


def test_criterion_7_d5_equiangularity():
    # stated expectation: pp = 1 and a symmetric measurement; the
    # clock-and-shift orbit of this vector has three distinct overlap
    # values (<v|Zv> = -1/4 alone forces the value 1/16), so this check
    # records the discrepancy rather than reproducing the claim
    f5 = Fiducial.from_vector([0, 1, -1, -1, 1])
    pp, values = pairwise_products(f5, TOL)
    sic = is_sic(f5, TOL)
    check("7-d5", pp == 1 and sic, f"pp={pp}, equiangular={sic}, values={values}")


def test_criterion_7_d7_products():
    # stated expectation: pp = 2; the clock-and-shift orbit gives 11
    # distinct overlap values for this vector
    f7 = Fiducial.from_vector([1, 1, 0, -1, 0, -1, 0])
    pp, _ = pairwise_products(f7, TOL)
    check("7-d7", pp == 2, f"pp={pp}")


# -- criterion 8: fiducial search ------------------------------------------------


def test_criterion_8_search():
    a5 = PermutationGroup.from_cycles(["(1,2,3,4,5)", "(3,4,5)"])
    reports = find_fiducials(a5, tol=TOL)
    target = Fiducial.from_vector([0, 1, -1, -1, 1]).vector()
    ops = displacement_operators(5)
    hit = any(
        r.is_mic and _displacement_equivalent(target, r.fiducial.vector(), ops)
        for r in reports
    )
    check("8-hit", hit, "degree-5 search reaches the published vector")

    pairs = list(combinations(range(5), 2))
    index = {p: i for i, p in enumerate(pairs)}
    gens = []
    for g in a5.generators:
        gens.append(tuple(index[tuple(sorted((g[a], g[b])))] for a, b in pairs))
    pentagram_group = PermutationGroup(gens, 10)
    reports10 = find_fiducials(pentagram_group, tol=TOL)
    check(
        "8-pentagram",
        not any(r.is_mic for r in reports10),
        f"{len(reports10)} candidates, none informationally complete",
    )


# -- criterion 9: property suite (compact; unit suites cover the rest) -----------


def test_criterion_9_tables_valid(sigma257, wbar, q_group,
                                  sigma257_records_13, wbar_records_16, q_records_16):
    for presentation, records in [
        (sigma257, sigma257_records_13),
        (wbar, wbar_records_16),
        (q_group, q_records_16),
    ]:
        for rec in records:
            rec.table.validate(presentation)
    check("9-tables", True, "all enumerated tables valid")


def test_criterion_9_lattice_oracle():
    from test_lowindex import (
        A4_GENS,
        A4_PRES,
        D4_GENS,
        D4_PRES,
        S3_GENS,
        S3_PRES,
        oracle_class_counts,
    )

    ok = True
    for presentation, gens in [
        (S3_PRES, S3_GENS),
        (A4_PRES, A4_GENS),
        (D4_PRES, D4_GENS),
    ]:
        order = max(oracle_class_counts(gens))
        records = low_index_subgroups(presentation, order)
        got = Counter(r.index for r in records)
        ok = ok and got == oracle_class_counts(gens)
    check("9-oracle", ok, "lattice enumeration matches the search")


def test_criterion_9_orbit_stabilizer(q_records_16):
    for rec in q_records_16:
        group = perm_image(rec.table)
        if group.order() > 10**7:
            continue
        for point in range(0, group.degree, 7):
            orbit = group.orbit_of(point)
            assert len(orbit) * group.point_stabilizer(point).order() == group.order()
    check("9-orbit-stabilizer", True, "orbit-stabilizer identity holds")


def test_criterion_9_line_intersections(q_records_16):
    for rec in q_records_16:
        if rec.index < 2:
            continue
        geom = build_geometry(perm_image(rec.table))
        for l1, l2 in combinations(geom.lines, 2):
            assert len(set(l1) & set(l2)) <= 1
    check("9-intersections", True, "line intersections at most one point")


def test_criterion_9_reference_round_trips():
    names = [
        GeometryName("complete", (9,)),
        GeometryName("multipartite", (2, 6)),
        GeometryName("fano"),
        GeometryName("pg32"),
        GeometryName("gq22"),
        GeometryName("pentagram"),
        GeometryName("grassmannian", (8,)),
    ]
    ok = all(
        (recognize(reference_model(n)).kind, recognize(reference_model(n)).params)
        == (n.kind, n.params)
        for n in names
    )
    check("9-roundtrips", ok, "model recognition round-trips")


def test_criterion_9_trace_orthogonality():
    ok = True
    for d in (2, 3, 4, 5, 6, 7):
        ops = displacement_operators(d)
        overlaps = np.einsum("aij,bij->ab", ops.conj(), ops)
        ok = ok and np.allclose(overlaps, d * np.eye(d * d), atol=1e-9)
    check("9-orthogonality", ok, "displacement trace orthogonality")


def test_criterion_9_sic_round_trips():
    ct = np.sqrt((1 + 1 / np.sqrt(3)) / 2)
    st = np.sqrt((1 - 1 / np.sqrt(3)) / 2)
    f2 = Fiducial.from_vector([ct, st * np.exp(1j * np.pi / 4)])
    f5 = Fiducial.from_vector(SIC5)
    assert is_sic(f2, TOL) and is_sic(f5, TOL)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for f in (f2, f5):
        d = f.dim
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        p = born_probabilities(rho, f)
        err = float(np.max(np.abs(reconstruct_state(p, f) - rho)))
        worst = max(worst, err)
    check("9-reconstruction", worst <= 1e-8, f"max round-trip error {worst:.2e}")
