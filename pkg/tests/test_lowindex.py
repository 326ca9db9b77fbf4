"""Low-index search checked against a brute-force subgroup-lattice oracle."""

import os
from collections import Counter
from itertools import combinations

import pytest

from cosetgeo.coset import coset_representatives
from cosetgeo.fpgroup import parse_presentation
from cosetgeo.lowindex import (
    SearchBudgetExceeded,
    eta_sequence,
    low_index_subgroups,
    schreier_generators,
)
from cosetgeo.permgrp import PermutationGroup, p_inv, p_mul, perm_image


# concrete models of the presented groups, for the oracle only
S3_PRES = parse_presentation("a,b | a^2, b^2, (ab)^3")
S3_GENS = [(1, 0, 2), (0, 2, 1)]
A4_PRES = parse_presentation("a,b | a^2, b^3, (ab)^3")
A4_GENS = [(1, 0, 3, 2), (0, 2, 3, 1)]
D4_PRES = parse_presentation("a,b | a^4, b^2, (ab)^2")
D4_GENS = [(1, 2, 3, 0), (0, 3, 2, 1)]


def group_elements(gens):
    degree = len(gens[0])
    ident = tuple(range(degree))
    seen = {ident}
    queue = [ident]
    while queue:
        p = queue.pop()
        for g in gens:
            q = p_mul(p, g)
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return seen


def all_subgroups(elements):
    """Every subgroup, by closing subsets one generator at a time."""
    ident = sorted(elements)[0]
    assert all(i == x for i, x in enumerate(ident))
    subgroups = {frozenset([ident])}
    frontier = [frozenset([ident])]
    while frontier:
        sub = frontier.pop()
        for extra in elements:
            if extra in sub:
                continue
            new = close(sub | {extra})
            if new not in subgroups:
                subgroups.add(new)
                frontier.append(new)
    return subgroups


def close(subset):
    queue = list(subset)
    seen = set(subset)
    while queue:
        p = queue.pop()
        for q in list(seen):
            for r in (p_mul(p, q), p_mul(q, p)):
                if r not in seen:
                    seen.add(r)
                    queue.append(r)
    return frozenset(seen)


def conjugacy_classes_of_subgroups(elements, subgroups):
    classes = []
    assigned = set()
    for sub in sorted(subgroups, key=lambda s: (len(s), sorted(s))):
        if sub in assigned:
            continue
        orbit = set()
        for g in elements:
            gi = p_inv(g)
            conj = frozenset(p_mul(p_mul(gi, h), g) for h in sub)
            orbit.add(conj)
        assigned |= orbit
        classes.append(orbit)
    return classes


def oracle_class_counts(gens):
    """Conjugacy classes of subgroups, counted by index."""
    elements = group_elements(gens)
    subs = all_subgroups(elements)
    classes = conjugacy_classes_of_subgroups(elements, subs)
    counts = Counter()
    for orbit in classes:
        index = len(elements) // len(next(iter(orbit)))
        counts[index] += 1
    return counts


@pytest.mark.parametrize(
    "presentation,gens",
    [(S3_PRES, S3_GENS), (A4_PRES, A4_GENS), (D4_PRES, D4_GENS)],
    ids=["S3", "A4", "D4"],
)
def test_class_counts_match_lattice_oracle(presentation, gens):
    order = len(group_elements(gens))
    expected = oracle_class_counts(gens)
    records = low_index_subgroups(presentation, order)
    got = Counter(r.index for r in records)
    assert got == expected


def test_s3_example_counts():
    records = low_index_subgroups(S3_PRES, 3)
    counts = [sum(1 for r in records if r.index == d) for d in (1, 2, 3)]
    assert counts == [1, 1, 1]


def test_free_group_on_one_generator():
    z = parse_presentation("a | ")
    records = low_index_subgroups(z, 3)
    counts = [sum(1 for r in records if r.index == d) for d in (1, 2, 3)]
    assert counts == [1, 1, 1]
    # the index-1 slot of the sequence excludes the whole group
    assert eta_sequence(records, 3) == [0, 1, 1]


def test_every_table_is_valid(sigma257, sigma257_records_13):
    for rec in sigma257_records_13:
        rec.table.validate(sigma257)
        assert rec.table.index == rec.index
        reps = coset_representatives(rec.table)
        for i, rep in enumerate(reps):
            assert rec.table.trace(0, rep) == i


def test_schreier_generators_fix_coset_zero(sigma257_records_13):
    for rec in sigma257_records_13:
        for w in rec.generators:
            assert rec.table.trace(0, w) == 0
        assert rec.generators == schreier_generators(rec.table)


def test_records_are_pairwise_nonconjugate():
    # conjugate subgroups of the image correspond to relabeled tables
    records = low_index_subgroups(A4_PRES, 12)
    elements = group_elements(A4_GENS)
    seen = []
    for rec in records:
        group = perm_image(rec.table)
        stab = frozenset(g for g in _image_elements(rec) if g[0] == 0)
        seen.append((rec.index, stab, rec))
    for (i1, s1, r1), (i2, s2, r2) in combinations(seen, 2):
        if i1 != i2:
            continue
        conjugate = False
        elems = _image_elements(r1)
        if _same_action(r1, r2):
            for g in elems:
                gi = p_inv(g)
                if frozenset(p_mul(p_mul(gi, h), g) for h in s1) == s2:
                    conjugate = True
                    break
        assert not conjugate, f"records {r1.class_id} and {r2.class_id} are conjugate"


def _image_elements(record):
    return group_elements(perm_image(record.table).generators)


def _same_action(r1, r2):
    return perm_image(r1.table).degree == perm_image(r2.table).degree and set(
        _image_elements(r1)
    ) == set(_image_elements(r2))


def test_monotone_consistency():
    for n in (4, 6, 8):
        small = low_index_subgroups(A4_PRES, n)
        big = low_index_subgroups(A4_PRES, n + 1)
        filtered = [(r.index, r.table.columns) for r in big if r.index <= n]
        assert [(r.index, r.table.columns) for r in small] == filtered


def test_node_budget_error_carries_partial():
    sigma = parse_presentation("a,b | aBab^2aBab^3, a^4bAb")
    with pytest.raises(SearchBudgetExceeded) as err:
        low_index_subgroups(sigma, 10, max_nodes=50)
    assert isinstance(err.value.partial, list)


def test_pure_python_search_agrees_with_compiled():
    sigma = parse_presentation("a,b | aBab^2aBab^3, a^4bAb")
    fast = low_index_subgroups(sigma, 8)
    os.environ["COSETGEO_PURE"] = "1"
    try:
        pure = low_index_subgroups(sigma, 8)
    finally:
        del os.environ["COSETGEO_PURE"]
    assert [(r.index, r.table.columns) for r in fast] == [
        (r.index, r.table.columns) for r in pure
    ]


def test_eta_prefix_to_index_10(sigma257):
    records = low_index_subgroups(sigma257, 10)
    assert eta_sequence(records, 10) == [0, 0, 0, 0, 0, 0, 2, 1, 0, 3]
