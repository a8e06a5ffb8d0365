"""Parsing, chamber enumeration, tope graph metrics, and the flat poset."""

from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import geometry
from magarr.arrangement import (
    CATALOG_NAMES,
    catalog,
    direct_sum,
    enumerate_chambers,
    essentialize,
    flat_orbits,
    intersection_lattice,
    localize,
    orbits_of_permutations,
    parse_arrangement,
    restrict,
    sign_feasible,
    tits_product,
    tope_symmetries,
)
from magarr.errors import ParseError


def test_parse_normalizes_to_primitive_integer_rows():
    arr = parse_arrangement([["1/2", "-3"], [0, 1]])
    assert arr.normals == ((1, -6), (0, 1))
    assert arr.labels == ("H0", "H1")
    assert arr.n == 2 and arr.dimension == 2


def test_parse_rejects_bad_input():
    with pytest.raises(ParseError):
        parse_arrangement([[0, 0], [1, 0]])
    with pytest.raises(ParseError):
        parse_arrangement([[1, 1], [2, 2]])
    with pytest.raises(ParseError):
        parse_arrangement([[1, 1], [-1, -1]])
    with pytest.raises(ParseError):
        parse_arrangement([[1, 2], [1]])
    with pytest.raises(ParseError):
        parse_arrangement([["a", "b"]])
    with pytest.raises(ParseError):
        parse_arrangement([])
    with pytest.raises(ParseError):
        parse_arrangement([[1, 0], [0, 1]], labels=("only-one",))


KNOWN_CHAMBERS = {
    "boolean:1": 2,
    "boolean:2": 4,
    "boolean:3": 8,
    "boolean:4": 16,
    "braid:3": 6,
    "braid:4": 24,
    "braid:5": 120,
    "coxeter:B2": 8,
    "coxeter:B3": 48,
    "u34": 14,
    "u45": 30,
    "k4me": 18,
    "k5me": 96,
    "nearpencil:4": 12,
    "nearpencil:5": 16,
    "bracelet": 102,
}


@pytest.mark.parametrize("name", sorted(KNOWN_CHAMBERS))
def test_catalog_chamber_counts(name):
    _, graph, lattice, _ = geometry(name)
    assert len(graph) == KNOWN_CHAMBERS[name]
    # sign-count route equals the alternating Moebius route
    chi = lattice.characteristic_polynomial()
    at_minus_one = sum(c * (-1) ** k for k, c in enumerate(chi))
    assert abs(at_minus_one) == len(graph)


def test_catalog_names_cover_fixture_list():
    assert set(KNOWN_CHAMBERS) == set(CATALOG_NAMES)
    with pytest.raises(ParseError):
        catalog("boolean:0")
    with pytest.raises(ParseError):
        catalog("no-such-name")


def test_characteristic_polynomials():
    cases = {
        "boolean:2": (1, -2, 1),
        "braid:3": (0, 2, -3, 1),
        "u34": (-3, 6, -4, 1),
        "coxeter:B2": (3, -4, 1),
    }
    for name, coeffs in cases.items():
        _, _, lattice, _ = geometry(name)
        assert lattice.characteristic_polynomial() == coeffs


@pytest.mark.parametrize("name", ["boolean:2", "braid:3", "u34"])
def test_tope_graph_is_partial_cube(name):
    _, graph, _, _ = geometry(name)
    for a in range(len(graph)):
        byfs = graph.bfs_distances(a)
        for b in range(len(graph)):
            assert byfs[b] == graph.dist(a, b)
            assert graph.dist(a, b) == (graph.masks[a] ^ graph.masks[b]).bit_count()


@pytest.mark.parametrize("name", ["boolean:2", "braid:3", "nearpencil:4"])
def test_antipodal_involution(name):
    arr, graph, _, _ = geometry(name)
    for a in range(len(graph)):
        b = graph.antipode(a)
        assert graph.antipode(b) == a
        assert graph.dist(a, b) == arr.n


def test_edges_cross_one_hyperplane():
    _, graph, _, _ = geometry("braid:4")
    for a, b in graph.edges():
        assert graph.dist(a, b) == 1
    for a in range(len(graph)):
        for b in graph.neighbours(a):
            assert (graph.masks[a] ^ graph.masks[b]).bit_count() == 1


@st.composite
def _sign_triples(draw):
    n = draw(st.integers(1, 6))
    vec = st.tuples(*([st.sampled_from((-1, 0, 1))] * n))
    return draw(vec), draw(vec), draw(vec)


@given(_sign_triples())
def test_tits_product_band_laws(fgh):
    f, g, h = fgh
    assert tits_product(f, f) == f
    assert tits_product(tits_product(f, g), h) == tits_product(
        f, tits_product(g, h)
    )
    assert tits_product(tits_product(f, g), f) == tits_product(f, g)


def test_tits_product_length_mismatch():
    with pytest.raises(ValueError):
        tits_product((1, 0), (1,))


def _all_faces(arr):
    return [
        s for s in product((-1, 0, 1), repeat=arr.n) if sign_feasible(arr, s)
    ]


@pytest.mark.parametrize("name", ["boolean:2", "braid:3", "nearpencil:4"])
def test_gate_property(name):
    """Projecting a chamber to a face lands on the nearest chamber above
    the face, and every chamber above the face routes through it."""
    arr, graph, _, _ = geometry(name)
    faces = _all_faces(arr)
    chamber_signs = [
        tuple(1 if graph.masks[i] >> h & 1 else -1 for h in range(arr.n))
        for i in range(len(graph))
    ]
    index_of = {s: i for i, s in enumerate(chamber_signs)}
    for f in faces:
        above = [
            i
            for i, s in enumerate(chamber_signs)
            if all(fv == 0 or fv == sv for fv, sv in zip(f, s))
        ]
        for c in range(len(graph)):
            fc = tits_product(f, chamber_signs[c])
            gate = index_of[fc]
            assert gate in above
            for d in above:
                assert graph.dist(d, c) == graph.dist(d, gate) + graph.dist(
                    gate, c
                )


def test_faces_counted_by_zaslavsky_sum():
    # total face count equals sum over flats of the restriction chambers
    arr, graph, lattice, _ = geometry("braid:3")
    faces = _all_faces(arr)
    total = sum(
        lattice.restriction_chamber_count(f.index) for f in lattice.flats
    )
    assert len(faces) == total == 13


def test_localize_and_restrict_shapes():
    arr = catalog("braid:3")
    loc = localize(arr, (0, 1))
    assert loc.n == 2 and loc.dimension == arr.dimension
    res = restrict(arr, (0,))
    # the two other reflection planes cut the same line on the wall
    assert res.n == 1 and res.dimension == arr.dimension - 1


def test_essentialize_preserves_chambers():
    arr = catalog("braid:4")
    ess = essentialize(arr)
    assert ess.dimension == 3
    assert len(enumerate_chambers(ess)) == 24


def test_direct_sum_multiplies_chambers():
    a = catalog("boolean:1")
    b = catalog("braid:3")
    ds = direct_sum(a, b)
    assert ds.n == a.n + b.n
    assert len(enumerate_chambers(ds)) == 2 * 6


KNOWN_SYMMETRY_ORDERS = {
    "boolean:2": 8,
    "braid:3": 12,
    "u34": 12,
    "coxeter:B2": 8,
    "nearpencil:5": 4,
}


@pytest.mark.parametrize("name", sorted(KNOWN_SYMMETRY_ORDERS))
def test_tope_symmetry_orders(name):
    _, graph, _, _ = geometry(name)
    perms = tope_symmetries(graph)
    assert len(perms) == KNOWN_SYMMETRY_ORDERS[name]
    for p in perms:
        assert sorted(p) == list(range(len(graph)))
        for a in range(len(graph)):
            for b in graph.neighbours(a):
                assert graph.dist(p[a], p[b]) == 1


def test_orbit_partitions():
    _, graph, lattice, perms = geometry("braid:3")
    orbit_id, orbits = orbits_of_permutations(len(graph), perms)
    assert sorted(x for o in orbits for x in o) == list(range(len(graph)))
    assert len(orbits) == 1  # reflection group acts transitively
    _, forbits = flat_orbits(lattice, perms, graph)
    sizes = sorted(len(o) for o in forbits)
    assert sizes == [1, 1, 3]


def test_rank2_flat_multiplicities():
    for name, want in {
        "u34": {2: 6},
        "k4me": {2: 4, 3: 2},
        "nearpencil:4": {2: 3, 3: 1},
    }.items():
        _, _, lattice, _ = geometry(name)
        assert lattice.rank3_line_multiplicities() == want
