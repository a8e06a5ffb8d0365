"""Shared fixtures: geometry is expensive, so catalog arrangements are
enumerated once per run and reused across test modules."""

from __future__ import annotations

import random

from magarr.arrangement import (
    catalog,
    enumerate_chambers,
    intersection_lattice,
    parse_arrangement,
)
from magarr.homology import magnitude_homology
from magarr.magnitude import chamber_orbits, magnitude_direct
from magarr.polyq import series_expand

_GEOMETRY = {}
_MAGNITUDE = {}
_HOMOLOGY = {}


def geometry(name):
    """(arrangement, tope graph, flat poset, symmetries) for a catalog name."""
    if name not in _GEOMETRY:
        arr = catalog(name)
        graph = enumerate_chambers(arr)
        lattice = intersection_lattice(arr, graph)
        _, _, perms = chamber_orbits(graph)
        _GEOMETRY[name] = (arr, graph, lattice, perms)
    return _GEOMETRY[name]


def magnitude_of(name, face_check=True):
    if name not in _MAGNITUDE:
        arr, graph, lattice, perms = geometry(name)
        _MAGNITUDE[name] = magnitude_direct(
            arr, graph, perms=perms, lattice=lattice, face_check=face_check
        )
    return _MAGNITUDE[name]


def homology_of(name, lmax):
    """Betti data at the given cap, with the boundary-square and Euler
    checks always enabled."""
    key = (name, lmax)
    if key not in _HOMOLOGY:
        arr, graph, lattice, perms = geometry(name)
        mag = magnitude_of(name)
        expected = mag.series
        if lmax >= len(expected):
            expected = series_expand(mag.magnitude, lmax)
        _HOMOLOGY[key] = magnitude_homology(
            arr, graph, lmax=lmax, perms=perms, verify_d2=True,
            expected_euler=expected,
        )
    return _HOMOLOGY[key]


def random_arrangements(count, seed, nmin=3, nmax=5, dim=3, span=2):
    """Deduplicated random integer arrangements for the property suite."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(nmin, nmax)
        rows = [
            [rng.randint(-span, span) for _ in range(dim)] for _ in range(n)
        ]
        try:
            arr = parse_arrangement(rows, name=f"rand{len(out)}")
        except Exception:
            continue
        out.append(arr)
    return out


def check_instance_laws(arr):
    """Invariants every central arrangement must satisfy, end to end."""
    from itertools import product as iproduct

    from magarr.arrangement import sign_feasible, tits_product
    from magarr.homology import magnitude_homology

    graph = enumerate_chambers(arr)
    lattice = intersection_lattice(arr, graph)
    size = len(graph)

    # sign enumeration agrees with the alternating Moebius count
    chi = lattice.characteristic_polynomial()
    assert abs(sum(c * (-1) ** k for k, c in enumerate(chi))) == size

    # edge metric is the separation metric, antipodes exist
    for a in range(size):
        bfs = graph.bfs_distances(a)
        for b in range(size):
            assert bfs[b] == graph.dist(a, b)
        anti = graph.antipode(a)
        assert graph.antipode(anti) == a
        assert graph.dist(a, anti) == arr.n

    # gate property of the projection onto each face
    faces = [
        s for s in iproduct((-1, 0, 1), repeat=arr.n) if sign_feasible(arr, s)
    ]
    chamber_signs = [
        tuple(1 if graph.masks[i] >> h & 1 else -1 for h in range(arr.n))
        for i in range(size)
    ]
    index_of = {s: i for i, s in enumerate(chamber_signs)}
    for f in faces:
        above = [
            i
            for i, s in enumerate(chamber_signs)
            if all(fv == 0 or fv == sv for fv, sv in zip(f, s))
        ]
        for c in range(size):
            fc = tits_product(f, chamber_signs[c])
            gate = index_of[fc]
            assert gate in above
            for d in above:
                assert graph.dist(d, c) == graph.dist(d, gate) + graph.dist(gate, c)

    # series, chain counts, and homology agree coefficient by coefficient
    mag = magnitude_direct(arr, graph, lattice=lattice)
    assert mag.ok, {k: v for k, v in mag.checks.items() if not v}
    hom = magnitude_homology(
        arr, graph, lmax=5, verify_d2=False,
        expected_euler=series_expand(mag.magnitude, 5),
    )
    assert hom.ok, {k: v for k, v in hom.checks.items() if not v}
    return size
