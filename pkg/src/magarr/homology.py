"""Bigraded magnitude homology of the chamber metric.

Generators in degree k and length l are proper chains of k+1 chambers
whose step distances sum to l.  The differential deletes an inner
chamber when the two adjacent steps cross disjoint hyperplane sets
(deletion then preserves the length).  Start, end, and the number of
times each hyperplane is crossed are all preserved, so the complex
splits into finite blocks which are resolved independently over the
integers.  Chamber symmetries act freely on blocks by relabelling the
start, so only one start per orbit is enumerated.
"""

from collections import defaultdict
from dataclasses import dataclass, field
import math

from .arrangement import (
    enumerate_chambers,
    flat_orbits,
    intersection_lattice,
    localize,
    orbits_of_permutations,
)
from .errors import BudgetExceededError, CheckFailedError
from .linalg import complex_homology, matrix_rank
from .magnitude import chamber_orbits

DEFAULT_LENGTH_BUDGET = 5_000_000


def default_length_cap(graph):
    """Length cap keeping desk-size runs in minutes, not hours."""
    n = graph.n
    size = len(graph)
    if size <= 30:
        return min(n + 2, 8)
    if size <= 130:
        return min(n + 2, 6)
    return min(n + 2, 4)


# ---------------------------------------------------------------------------
# chain enumeration


def _start_blocks(graph, start, lmax, per_length_counts, per_length_budget,
                  full_support_only=False):
    """All proper chains from one start, grouped into boundary blocks.

    Returns {(length, end, profile): {degree: [chains]}} where profile
    counts the crossings of each hyperplane along the chain.  Deleting
    a chamber at a smooth point merges two disjoint crossing sets, so
    the whole profile survives the differential, not just its support;
    keying blocks on it keeps them small.  Chains are tuples of chamber
    indices.  ``per_length_counts`` tallies chains per total length
    across calls and trips the budget error.
    """
    masks = graph.masks
    size = len(masks)
    n = graph.n
    blocks = {}
    bits_of = {}
    stack = [((start,), 0, (0,) * n, n)]
    while stack:
        chain, length, profile, missing = stack.pop()
        if not full_support_only or missing == 0:
            key = (length, chain[-1], profile)
            per_degree = blocks.get(key)
            if per_degree is None:
                per_degree = blocks[key] = {}
            per_degree.setdefault(len(chain) - 1, []).append(chain)
        cnt = per_length_counts.get(length, 0) + 1
        per_length_counts[length] = cnt
        if cnt > per_length_budget:
            raise BudgetExceededError(
                f"chains of length {length}", per_length_budget, cnt
            )
        remaining = lmax - length
        if remaining < 1:
            continue
        end = chain[-1]
        end_mask = masks[end]
        for j in range(size):
            if j == end:
                continue
            sep = end_mask ^ masks[j]
            d = sep.bit_count()
            if d > remaining:
                continue
            bits = bits_of.get(sep)
            if bits is None:
                bits = bits_of[sep] = tuple(
                    h for h in range(n) if sep >> h & 1
                )
            nprofile = list(profile)
            nmissing = missing
            for h in bits:
                if nprofile[h] == 0:
                    nmissing -= 1
                nprofile[h] += 1
            if full_support_only and nmissing > remaining - d:
                continue
            stack.append((chain + (j,), length + d, tuple(nprofile), nmissing))
    return blocks


def _block_homology(block, masks, want_torsion=True, verify_d2=True):
    """Betti numbers and torsion of one block, graded by degree.

    Returns {degree: (betti, torsion factors, chain count)}.
    """
    degrees = sorted(block)
    index = {k: {c: i for i, c in enumerate(block[k])} for k in degrees}
    boundaries = {}
    for k in degrees:
        if k == 0:
            continue
        lower = index.get(k - 1)
        cols = {}
        for col, chain in enumerate(block[k]):
            colmap = {}
            for i in range(1, k):
                a, u, b = chain[i - 1], chain[i], chain[i + 1]
                if (masks[a] ^ masks[u]) & (masks[u] ^ masks[b]):
                    continue
                target = chain[:i] + chain[i + 1 :]
                if lower is None:
                    raise CheckFailedError("boundary target outside block")
                row = lower[target]
                sign = -1 if i % 2 else 1
                coeff = colmap.get(row, 0) + sign
                if coeff:
                    colmap[row] = coeff
                else:
                    del colmap[row]
            if colmap:
                cols[col] = colmap
        if cols:
            boundaries[k] = cols
    if verify_d2:
        _assert_d2_zero(boundaries)
    dims = {k: len(block[k]) for k in degrees}
    hom = complex_homology(dims, boundaries, want_torsion)
    return {
        k: (hom[k][0], hom[k][1], dims[k])
        for k in degrees
    }


def _assert_d2_zero(boundaries):
    for k, upper in boundaries.items():
        lower = boundaries.get(k - 1)
        if not lower:
            continue
        for colmap in upper.values():
            acc = defaultdict(int)
            for mid, v in colmap.items():
                for row, w in lower.get(mid, {}).items():
                    acc[row] += v * w
            if any(acc.values()):
                raise CheckFailedError(
                    "boundary composed with itself is nonzero"
                )


# ---------------------------------------------------------------------------
# dynamic chain counting (no enumeration)


def chain_count_table(graph, lmax, orbit_data=None):
    """Number of generating chains per (degree, length), all starts.

    Pure counting recursion over (end chamber, length) per degree; used
    to cross-check the enumeration and the Euler characteristics.
    """
    if orbit_data is None:
        orbit_id, orbits, _ = chamber_orbits(graph)
    else:
        orbit_id, orbits = orbit_data
    size = len(graph)
    dist = [[graph.dist(i, j) for j in range(size)] for i in range(size)]
    totals = defaultdict(int)
    for orbit in orbits:
        rep = orbit[0]
        weight = len(orbit)
        cur = [[0] * (lmax + 1) for _ in range(size)]
        cur[rep][0] = 1
        k = 0
        while True:
            level = sum(sum(row) for row in cur)
            if level == 0:
                break
            for v in range(size):
                row = cur[v]
                for length in range(lmax + 1):
                    if row[length]:
                        totals[(k, length)] += weight * row[length]
            if k == lmax:
                break
            nxt = [[0] * (lmax + 1) for _ in range(size)]
            for u in range(size):
                row = cur[u]
                du = dist[u]
                for length in range(lmax + 1):
                    c = row[length]
                    if not c:
                        continue
                    for v in range(size):
                        if v == u:
                            continue
                        nl = length + du[v]
                        if nl <= lmax:
                            nxt[v][nl] += c
            cur = nxt
            k += 1
    return dict(totals)


# ---------------------------------------------------------------------------
# main computation


@dataclass
class HomologyResult:
    """Betti table with torsion and consistency data."""

    lmax: int
    betti: dict
    torsion: dict
    chain_dims: dict
    interior_betti: dict
    interior_torsion: dict
    chamber_count: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def betti_at(self, k, length):
        return self.betti.get((k, length), 0)

    def torsion_free(self):
        return not any(self.torsion.values())

    def rows(self):
        """Matrix of ranks: row per degree, column per length."""
        if not self.betti:
            return []
        kmax = max(k for k, _ in self.betti)
        out = []
        for k in range(kmax + 1):
            out.append([self.betti.get((k, l), 0) for l in range(self.lmax + 1)])
        return out


def magnitude_homology(arrangement, graph=None, lmax=None, perms=None,
                       per_length_budget=DEFAULT_LENGTH_BUDGET,
                       interior_only=False, verify_d2=True,
                       expected_euler=None):
    """Bigraded Betti table through total length ``lmax``.

    ``interior_only`` restricts the complex to chains crossing every
    hyperplane, which is the summand entering the face decomposition.
    When ``expected_euler`` maps lengths to integers (normally the
    magnitude series), the per-length Euler characteristics of the
    chain spaces are checked against it.
    """
    if graph is None:
        graph = enumerate_chambers(arrangement)
    orbit_id, orbits, perms = chamber_orbits(graph, perms)
    if lmax is None:
        lmax = default_length_cap(graph)
    masks = graph.masks
    betti = defaultdict(int)
    torsion = defaultdict(list)
    dims = defaultdict(int)
    int_betti = defaultdict(int)
    int_torsion = defaultdict(list)
    per_length_counts = {}
    for orbit in orbits:
        rep = orbit[0]
        weight = len(orbit)
        blocks = _start_blocks(
            graph, rep, lmax, per_length_counts, per_length_budget,
            full_support_only=interior_only,
        )
        for (length, _end, profile), block in blocks.items():
            summary = _block_homology(block, masks, verify_d2=verify_d2)
            interior = 0 not in profile
            for k, (b, tor, dim) in summary.items():
                if b:
                    betti[(k, length)] += weight * b
                if tor:
                    torsion[(k, length)].extend(tor * weight)
                dims[(k, length)] += weight * dim
                if interior:
                    if b:
                        int_betti[(k, length)] += weight * b
                    if tor:
                        int_torsion[(k, length)].extend(tor * weight)

    checks = {}
    if not interior_only:
        counted = chain_count_table(graph, lmax, (orbit_id, orbits))
        checks["chain_counts_match_recursion"] = counted == dict(dims)
        euler_enum = _euler_by_length(dims, lmax)
        euler_homology = _euler_by_length(betti, lmax)
        checks["euler_of_homology_matches_chains"] = euler_enum == euler_homology
        if expected_euler is not None:
            checks["euler_matches_series"] = all(
                euler_enum.get(l, 0) == expected_euler[l] for l in range(lmax + 1)
            )
    result = HomologyResult(
        lmax=lmax,
        betti=dict(int_betti) if interior_only else dict(betti),
        torsion=_tidy_torsion(int_torsion if interior_only else torsion),
        chain_dims=dict(dims),
        interior_betti=dict(int_betti),
        interior_torsion=_tidy_torsion(int_torsion),
        chamber_count=len(graph),
        checks=checks,
    )
    return result


def _euler_by_length(table, lmax):
    out = {}
    for (k, length), v in table.items():
        if length <= lmax:
            out[length] = out.get(length, 0) + (v if k % 2 == 0 else -v)
    return out


def _tidy_torsion(torsion):
    return {key: tuple(sorted(vals)) for key, vals in torsion.items() if vals}


# ---------------------------------------------------------------------------
# geodesic part, two routes


def geodesic_betti_formula(lattice):
    """Geodesic ranks from the flat poset alone.

    The block of chains between chambers a, b at exact distance d(a,b)
    only sees the hyperplanes separating a from b, whose closure is a
    flat X; summing the order-complex homology over all such pairs
    collapses to c^X (restriction chambers) times c_X (chambers meeting
    the flat) at bidegree (rank X, #A_X).
    """
    out = {}
    for f in lattice.flats:
        c_upper = lattice.restriction_chamber_count(f.index)
        c_lower = lattice.whitney_sum(f.index)
        key = (f.rank, f.size)
        out[key] = out.get(key, 0) + c_upper * c_lower
    return out


def _pair_orbits(graph, perms):
    size = len(graph)
    seen = [False] * size * size
    out = []
    for a in range(size):
        for b in range(size):
            pos = a * size + b
            if seen[pos]:
                continue
            members = 0
            stack = [(a, b)]
            seen[pos] = True
            while stack:
                u, v = stack.pop()
                members += 1
                for p in perms:
                    w = (p[u], p[v])
                    wpos = w[0] * size + w[1]
                    if not seen[wpos]:
                        seen[wpos] = True
                        stack.append(w)
            out.append(((a, b), members))
    return out


def _interval_poset(graph, a, b):
    """Chambers strictly between a and b, with the betweenness order."""
    sep_ab = graph.masks[a] ^ graph.masks[b]
    points = []
    for u in range(len(graph)):
        if u == a or u == b:
            continue
        su = graph.masks[a] ^ graph.masks[u]
        if su | sep_ab == sep_ab:
            points.append(u)
    below = {}
    for u in points:
        su = graph.masks[a] ^ graph.masks[u]
        below[u] = su
    less = {u: [] for u in points}
    for u in points:
        for v in points:
            if u != v and below[u] | below[v] == below[v]:
                less[u].append(v)
    return points, less


def _order_complex_reduced_betti(points, less):
    """Reduced Betti numbers and torsion of the order complex.

    The empty simplex is kept in dimension -1, so a poset with no
    points reports one class there.
    """
    simplices = {-1: [()]}
    stack = [(u,) for u in points]
    while stack:
        chain = stack.pop()
        simplices.setdefault(len(chain) - 1, []).append(chain)
        for v in less[chain[-1]]:
            stack.append(chain + (v,))
    degrees = sorted(simplices)
    index = {d: {s: i for i, s in enumerate(simplices[d])} for d in degrees}
    boundaries = {}
    for d in degrees:
        if d < 0:
            continue
        lower = index[d - 1]
        cols = {}
        for col, s in enumerate(simplices[d]):
            colmap = {}
            for j in range(d + 1):
                face = s[:j] + s[j + 1 :]
                row = lower[face]
                sign = -1 if j % 2 else 1
                coeff = colmap.get(row, 0) + sign
                if coeff:
                    colmap[row] = coeff
                else:
                    del colmap[row]
            if colmap:
                cols[col] = colmap
        if cols:
            boundaries[d] = cols
    dims = {d: len(simplices[d]) for d in degrees}
    return complex_homology(dims, boundaries)


def geodesic_homology_direct(graph, lmax, perms=None):
    """Geodesic ranks from interval order complexes, pair by pair.

    A chain between a and b of total length exactly d(a, b) is a chain
    in the open interval poset, so those blocks are order complexes and
    their homology appears in bidegree (j + 2, d(a, b)) for reduced
    homology in dimension j, with (0, 0) counting the chambers.
    """
    if perms is None:
        _, _, perms = chamber_orbits(graph)
    table = defaultdict(int)
    torsion = defaultdict(list)
    for (a, b), weight in _pair_orbits(graph, perms):
        d = graph.dist(a, b)
        if d > lmax:
            continue
        if a == b:
            table[(0, 0)] += weight
            continue
        points, less = _interval_poset(graph, a, b)
        for j, (betti, tor) in _order_complex_reduced_betti(points, less).items():
            if betti:
                table[(j + 2, d)] += weight * betti
            if tor:
                torsion[(j + 2, d)].extend(tor * weight)
    return dict(table), _tidy_torsion(torsion)


# ---------------------------------------------------------------------------
# structural formulas and identities


def diagonal_betti_formula(lattice, lmax):
    """Ranks on the diagonal from flats whose rank equals their size."""
    out = {}
    for length in range(lmax + 1):
        total = 0
        for f in lattice.flats:
            if f.rank != f.size:
                continue
            c = lattice.restriction_chamber_count(f.index)
            if f.rank == 0:
                total += c if length == 0 else 0
                continue
            if length < 1:
                continue
            total += c * (1 << f.rank) * math.comb(length - 1, f.rank - 1)
        out[length] = total
    return out


def interior_diagonal_boolean(d, lmax):
    """Interior diagonal ranks of the coordinate arrangement in rank d."""
    return {
        length: (1 << d) * math.comb(length - 1, d - 1)
        for length in range(lmax + 1)
        if length >= 1
    }


def small_length_identities(result, lattice):
    """Closed forms for the first few lengths against the computed table."""
    edge_sum = sum(
        lattice.restriction_chamber_count(f.index)
        for f in lattice.flats_of_rank(1)
    )
    pair_sum = sum(
        lattice.restriction_chamber_count(f.index)
        for f in lattice.flats_of_rank(2)
        if f.size == 2
    )
    checks = {
        "b00_chambers": result.betti_at(0, 0) == lattice.chamber_count,
    }
    if result.lmax >= 1:
        checks["b11_walls"] = result.betti_at(1, 1) == 2 * edge_sum
    if result.lmax >= 2:
        checks["b12_vanishes"] = result.betti_at(1, 2) == 0
        checks["b22_recursion"] = result.betti_at(2, 2) == result.betti_at(
            1, 1
        ) + 4 * pair_sum
    return checks


def boolean_diagonality(result, lattice):
    """Diagonal concentration for coordinate-like arrangements, and the
    guaranteed off-diagonal corner class otherwise (needs lmax >= n)."""
    n = lattice.arrangement.n
    rank = lattice.rank
    out = {}
    if rank == n:
        out["diagonal_only"] = all(
            k == length for (k, length), v in result.betti.items() if v
        )
    elif result.lmax >= n:
        out["corner_class_present"] = result.betti_at(rank, n) >= lattice.chamber_count
    return out


def reciprocity_check(result, interior_result, rank, n):
    """Interior Euler characteristics repeat the plain ones shifted by n
    and vanish below length n."""
    plain = _euler_by_length(result.betti, result.lmax)
    interior = _euler_by_length(interior_result, result.lmax)
    sign = -1 if rank % 2 else 1
    ok = True
    for length in range(min(n, result.lmax + 1)):
        if interior.get(length, 0) != 0:
            ok = False
    for length in range(result.lmax + 1 - n):
        want = sign * plain.get(length, 0)
        if interior.get(length + n, 0) != want:
            ok = False
    return ok


def face_decomposition_check(arrangement, graph, lattice, result, perms,
                             per_length_budget=DEFAULT_LENGTH_BUDGET):
    """Betti table equals the flat-indexed sum of interior tables.

    Every chain crosses the hyperplanes of some flat's localization and
    sits over one chamber of the restriction, giving

        b_{k,l}(A) = sum over flats X of c^X * interior b_{k,l}(A_X).

    Proper flats are recomputed independently (one representative per
    symmetry orbit); the top term is the interior part of the main run.
    """
    _oid, forbits = flat_orbits(lattice, perms, graph)
    top = lattice.flats[-1]
    total = defaultdict(int)
    for orbit in forbits:
        rep = lattice.flats[orbit[0]]
        weight = len(orbit)
        c = lattice.restriction_chamber_count(rep.index)
        for other in orbit[1:]:
            if lattice.restriction_chamber_count(other) != c:
                raise CheckFailedError("restriction count varies inside an orbit")
        if rep.index == top.index:
            for key, v in result.interior_betti.items():
                total[key] += weight * c * v
            continue
        if rep.rank == 0:
            total[(0, 0)] += weight * c
            continue
        sub = localize(arrangement, rep.hyperplanes)
        sub_res = magnitude_homology(
            sub, lmax=result.lmax, interior_only=True,
            per_length_budget=per_length_budget, verify_d2=False,
        )
        for key, v in sub_res.betti.items():
            total[key] += weight * c * v
    want = {k: v for k, v in result.betti.items() if v}
    got = {k: v for k, v in total.items() if v}
    return got == want, got


def four_cut_minimum(graph, cap=None, perms=None):
    """Shortest degree-3 chain whose halves are geodesic but which is not.

    Crossing sets s1, s2, s3 of the three steps must satisfy s1 and s2
    disjoint, s2 and s3 disjoint, s1 meeting s3.  Returns the minimal
    total length, or None when none exists up to ``cap``.
    """
    if cap is None:
        cap = graph.n + 2
    if perms is None:
        _, _, perms = chamber_orbits(graph)
    _, orbits = orbits_of_permutations(len(graph), perms)
    masks = graph.masks
    size = len(graph)
    best = None
    for orbit in orbits:
        x0 = orbit[0]
        m0 = masks[x0]
        for x1 in range(size):
            if x1 == x0:
                continue
            s1 = m0 ^ masks[x1]
            d1 = s1.bit_count()
            if best is not None and d1 + 2 >= best:
                continue
            for x2 in range(size):
                if x2 == x1:
                    continue
                s2 = masks[x1] ^ masks[x2]
                if s1 & s2:
                    continue
                d2 = s2.bit_count()
                if best is not None and d1 + d2 + 1 >= best:
                    continue
                for x3 in range(size):
                    if x3 == x2:
                        continue
                    s3 = masks[x2] ^ masks[x3]
                    if s2 & s3 or not s1 & s3:
                        continue
                    total = d1 + d2 + s3.bit_count()
                    if total <= cap and (best is None or total < best):
                        best = total
    return best


# ---------------------------------------------------------------------------
# report-only probes


def components_by_weight(arrangement, lattice):
    """Partition of hyperplanes: join H and K when at least three pass
    through their common flat."""
    n = arrangement.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    flats_sorted = sorted(lattice.flats, key=lambda f: f.rank)
    for h in range(n):
        for k in range(h + 1, n):
            closure = None
            for f in flats_sorted:
                if h in f.hyperplanes and k in f.hyperplanes:
                    closure = f
                    break
            if closure is not None and closure.size >= 3:
                ra, rb = find(h), find(k)
                if ra != rb:
                    parent[ra] = rb
    groups = defaultdict(list)
    for h in range(n):
        groups[find(h)].append(h)
    return [tuple(sorted(g)) for g in groups.values()]


def decomposability_heuristic(arrangement, lattice):
    """Likely direct-sum structure from rank-two incidences.

    Decomposable when the weight components split the hyperplanes and
    their ranks add up to the total rank.
    """
    comps = components_by_weight(arrangement, lattice)
    if len(comps) <= 1:
        return False, comps
    total = sum(
        matrix_rank([arrangement.normals[h] for h in comp]) for comp in comps
    )
    return total == lattice.rank, comps


def conjecture_probes(arrangement, graph, lattice, mag_result, hom_result):
    """Machine-readable observations; never asserted as theorems.

    The uniformity probe can only certify non-transitivity (a uniform
    distance profile does not imply a transitive group), so it is
    one-directional: a counterexample needs a non-uniform profile and a
    missing cyclotomic factor.  The corner probe applies to
    arrangements the weight heuristic deems indecomposable.
    """
    from .magnitude import profile_uniform  # local import avoids a cycle

    probes = {}
    probes["torsion_free"] = {
        "observed": not any(hom_result.torsion.values()),
        "detail": {f"{k},{l}": list(v) for (k, l), v in hom_result.torsion.items()},
    }
    violation = None
    for i, c in enumerate(mag_result.series):
        if c and (c > 0) != (i % 2 == 0):
            violation = i
            break
    probes["euler_signs_alternate"] = {
        "observed": violation is None,
        "first_violation": violation,
    }

    n = mag_result.n
    rank = mag_result.rank
    uniform_needed = None
    if rank >= 3 and rank % 2 == 1:
        uniform_needed = 2 * n
    elif rank >= 4 and rank % 2 == 0:
        uniform_needed = n
    factor_orders = {k for k, _mult in mag_result.cyclotomic_den}
    uniform, _profiles = profile_uniform(graph)
    counterexample = bool(
        uniform_needed is not None
        and not uniform
        and uniform_needed not in factor_orders
    )
    probes["nonuniform_forces_cyclotomic_factor"] = {
        "applies": uniform_needed is not None,
        "required_order": uniform_needed,
        "profile_uniform": uniform,
        "factor_present": (
            uniform_needed in factor_orders if uniform_needed else None
        ),
        "counterexample": counterexample,
    }

    decomposable, comps = decomposability_heuristic(arrangement, lattice)
    corner = None
    if hom_result.lmax >= n:
        corner = hom_result.betti_at(rank, n) == hom_result.betti_at(0, 0)
    applies = hom_result.lmax >= n and not decomposable
    probes["corner_matches_chambers"] = {
        "applies": applies,
        "decomposable": decomposable,
        "components": [list(c) for c in comps],
        "observed": corner if applies else None,
    }
    probes["no_counterexample"] = bool(
        probes["torsion_free"]["observed"]
        and probes["euler_signs_alternate"]["observed"]
        and not counterexample
        and (not applies or corner)
    )
    return probes
