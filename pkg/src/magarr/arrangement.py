"""Central hyperplane arrangements over the rationals.

An arrangement is a finite list of integer covectors (the hyperplane
normals).  Everything downstream works with exact data derived from it:
the chambers as sign vectors, the graph metric on chambers, and the
poset of intersection subspaces with its Moebius function.

Chambers are encoded as bitmasks: bit ``h`` is set when the chamber lies
on the positive side of hyperplane ``h``.  Distance between chambers is
the number of separating hyperplanes, which is the popcount of the XOR
of their masks.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools

from .errors import ParseError, CheckFailedError
from .linalg import (
    clear_denominators,
    in_row_space,
    nullspace,
    rref,
    strict_feasible,
)

# Candidate symmetry search enumerates signed coordinate permutations,
# which is 2^d * d! maps.  Above this cap only the antipodal map and
# pure sign flips are tried.
_SYMMETRY_SEARCH_CAP = 50000


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sign(x):
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def _primitive_row(row):
    """Scale a rational row by a positive factor to primitive integers."""
    cleared = clear_denominators([Fraction(x) for x in row])
    return cleared


def _sign_canonical(row):
    """Flip a primitive row so its first nonzero entry is positive.

    Returns (canonical_row, sign) with row == sign * canonical_row.
    """
    for x in row:
        if x:
            if x < 0:
                return tuple(-v for v in row), -1
            return tuple(row), 1
    raise ValueError("zero row has no canonical sign")


@dataclass(frozen=True)
class Arrangement:
    """A central arrangement given by primitive integer normals."""

    dimension: int
    normals: tuple
    labels: tuple

    @property
    def n(self):
        return len(self.normals)

    def label_of(self, h):
        return self.labels[h]

    def __repr__(self):
        return f"Arrangement(d={self.dimension}, n={self.n})"


def parse_arrangement(rows, labels=None, name=None):
    """Validate raw rows and build an :class:`Arrangement`.

    Rows may contain ints, strings of ints/fractions, or Fractions.
    Each row is scaled by a positive rational to a primitive integer
    covector; the caller's choice of orientation is preserved.  Zero
    rows and proportional duplicates are rejected.
    """
    parsed = []
    for i, row in enumerate(rows):
        try:
            vals = [Fraction(x) for x in row]
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ParseError(f"row {i}: cannot read entries ({exc})") from None
        parsed.append(vals)
    if not parsed:
        raise ParseError("arrangement needs at least one hyperplane")
    dim = len(parsed[0])
    if dim == 0:
        raise ParseError("row 0: empty row")
    for i, vals in enumerate(parsed):
        if len(vals) != dim:
            raise ParseError(f"row {i}: length {len(vals)} != {dim}")
        if not any(vals):
            raise ParseError(f"row {i}: zero normal does not define a hyperplane")
    normals = tuple(_primitive_row(v) for v in parsed)
    seen = {}
    for i, nr in enumerate(normals):
        key, _ = _sign_canonical(nr)
        if key in seen:
            raise ParseError(f"rows {seen[key]} and {i} define the same hyperplane")
        seen[key] = i
    if labels is None:
        labels = tuple(f"H{i}" for i in range(len(normals)))
    else:
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(normals):
            raise ParseError("label count does not match row count")
    return Arrangement(dimension=dim, normals=normals, labels=labels)


# ---------------------------------------------------------------------------
# named catalog


def _braid(m):
    # e_i - e_j in R^m, i < j; rank m-1, not essential.
    rows = []
    labels = []
    for i in range(m):
        for j in range(i + 1, m):
            r = [0] * m
            r[i] = 1
            r[j] = -1
            rows.append(r)
            labels.append(f"x{i + 1}-x{j + 1}")
    return rows, labels


def _nearpencil(m):
    # One plane z=0 plus m-1 planes through the z-axis with distinct slopes.
    if m < 3:
        raise ParseError("nearpencil:n needs n >= 3")
    rows = [[0, 0, 1]]
    labels = ["z"]
    rows.append([0, 1, 0])
    labels.append("y")
    for k in range(m - 2):
        rows.append([1, k, 0])
        labels.append(f"x+{k}y" if k else "x")
    return rows, labels


_CATALOG_BUILDERS = {
    "u34": lambda: (
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
        ["x", "y", "z", "x+y+z"],
    ),
    "u45": lambda: (
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [1, 1, 1, 1],
        ],
        ["x1", "x2", "x3", "x4", "sum"],
    ),
    "k4me": lambda: (
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1]],
        ["x", "y", "z", "x+z", "y+z"],
    ),
    "coxeter:b2": lambda: (
        [[1, 0], [0, 1], [1, 1], [1, -1]],
        ["x", "y", "x+y", "x-y"],
    ),
    "coxeter:b3": lambda: (
        [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, 1, 0],
            [1, -1, 0],
            [1, 0, 1],
            [1, 0, -1],
            [0, 1, 1],
            [0, 1, -1],
        ],
        ["x", "y", "z", "x+y", "x-y", "x+z", "x-z", "y+z", "y-z"],
    ),
    "bracelet": lambda: (
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [1, 0, 0, 1],
            [0, 1, 0, 1],
            [0, 0, 1, 1],
            [1, 1, 0, 1],
            [1, 0, 1, 1],
            [0, 1, 1, 1],
        ],
        [
            "x1",
            "x2",
            "x3",
            "x1+x4",
            "x2+x4",
            "x3+x4",
            "x1+x2+x4",
            "x1+x3+x4",
            "x2+x3+x4",
        ],
    ),
}


def catalog(name):
    """Build a named arrangement.

    Supported names: ``boolean:d``, ``braid:n``, ``coxeter:B2``,
    ``coxeter:B3``, ``u34``, ``u45``, ``k4me``, ``k5me``, ``bracelet``,
    ``nearpencil:n``.
    """
    key = name.strip().lower()
    if key in _CATALOG_BUILDERS:
        rows, labels = _CATALOG_BUILDERS[key]()
        return parse_arrangement(rows, labels=labels, name=key)
    if ":" in key:
        head, _, tail = key.partition(":")
        try:
            m = int(tail)
        except ValueError:
            raise ParseError(f"unknown catalog name {name!r}") from None
        if head == "boolean":
            if not 1 <= m <= 12:
                raise ParseError("boolean:d needs 1 <= d <= 12")
            rows = [[1 if j == i else 0 for j in range(m)] for i in range(m)]
            return parse_arrangement(rows, labels=[f"x{i + 1}" for i in range(m)])
        if head == "braid":
            if not 2 <= m <= 6:
                raise ParseError("braid:n needs 2 <= n <= 6")
            rows, labels = _braid(m)
            return parse_arrangement(rows, labels=labels)
        if head == "nearpencil":
            rows, labels = _nearpencil(m)
            return parse_arrangement(rows, labels=labels)
    if key == "k5me":
        rows, labels = _braid(5)
        # drop the edge between the last two vertices of K5
        drop = labels.index("x4-x5")
        rows = rows[:drop] + rows[drop + 1 :]
        labels = labels[:drop] + labels[drop + 1 :]
        return parse_arrangement(rows, labels=labels)
    raise ParseError(f"unknown catalog name {name!r}")


CATALOG_NAMES = (
    "boolean:1",
    "boolean:2",
    "boolean:3",
    "boolean:4",
    "braid:3",
    "braid:4",
    "braid:5",
    "coxeter:B2",
    "coxeter:B3",
    "u34",
    "u45",
    "k4me",
    "k5me",
    "bracelet",
    "nearpencil:4",
    "nearpencil:5",
)


# ---------------------------------------------------------------------------
# chambers and the tope graph


def sign_feasible(arrangement, signs):
    """Exact witness for a sign vector, or None when infeasible.

    ``signs`` is a sequence over {+1, 0, -1}, one entry per hyperplane.
    Zero entries pin the point to the hyperplane; the rest must hold
    strictly.  The witness is an integer point, verified before return.
    """
    d = arrangement.dimension
    if len(signs) != arrangement.n:
        raise ValueError("sign vector length mismatch")
    zero_rows = [arrangement.normals[i] for i, s in enumerate(signs) if s == 0]
    if zero_rows:
        basis = nullspace(zero_rows, d)
    else:
        basis = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
    strict = [(i, s) for i, s in enumerate(signs) if s != 0]
    if not strict:
        return (0,) * d
    if not basis:
        return None
    rows = []
    for i, s in strict:
        row = tuple(s * _dot(arrangement.normals[i], b) for b in basis)
        if not any(row):
            return None
        rows.append(row)
    y = strict_feasible(rows)
    if y is None:
        return None
    point = tuple(sum(y[b] * basis[b][j] for b in range(len(basis))) for j in range(d))
    for i, s in enumerate(signs):
        if _sign(_dot(arrangement.normals[i], point)) != s:
            raise CheckFailedError("witness does not match requested signs")
    return point


class TopeGraph:
    """Chambers of an arrangement with the separation metric."""

    def __init__(self, arrangement, masks, witnesses):
        self.arrangement = arrangement
        self.n = arrangement.n
        self.masks = tuple(masks)
        self.witnesses = tuple(witnesses)
        self.index = {m: i for i, m in enumerate(self.masks)}
        self._edges = None

    def __len__(self):
        return len(self.masks)

    def dist(self, i, j):
        return (self.masks[i] ^ self.masks[j]).bit_count()

    def separation(self, i, j):
        """Bitmask of hyperplanes separating chambers i and j."""
        return self.masks[i] ^ self.masks[j]

    def antipode(self, i):
        full = (1 << self.n) - 1
        return self.index[self.masks[i] ^ full]

    def edges(self):
        """Pairs (i, j), i < j, at separation distance one."""
        if self._edges is None:
            out = []
            for i, m in enumerate(self.masks):
                for h in range(self.n):
                    j = self.index.get(m ^ (1 << h))
                    if j is not None and i < j:
                        out.append((i, j))
            self._edges = tuple(out)
        return self._edges

    def neighbours(self, i):
        m = self.masks[i]
        out = []
        for h in range(self.n):
            j = self.index.get(m ^ (1 << h))
            if j is not None:
                out.append(j)
        return out

    def bfs_distances(self, i):
        """Graph distances from chamber i, walking edges only."""
        dist = {i: 0}
        frontier = [i]
        while frontier:
            nxt = []
            for u in frontier:
                for v in self.neighbours(u):
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        return dist


def enumerate_chambers(arrangement):
    """All chambers, by inserting hyperplanes one at a time.

    After inserting hyperplane i, each partial chamber carries a strict
    witness.  A chamber splits exactly when the opposite side is also
    strictly feasible, decided by an exact LP.
    """
    d = arrangement.dimension
    normals = arrangement.normals
    current = [(0, (0,) * d)]
    for i, a in enumerate(normals):
        nxt = []
        for mask, w in current:
            s = _sign(_dot(a, w))
            for target in (1, -1):
                if s == target:
                    wit = w
                else:
                    rows = []
                    for h in range(i):
                        sgn = 1 if mask >> h & 1 else -1
                        rows.append(tuple(sgn * x for x in normals[h]))
                    rows.append(tuple(target * x for x in a))
                    wit = strict_feasible(rows)
                    if wit is None:
                        continue
                new_mask = mask | (1 << i) if target == 1 else mask
                nxt.append((new_mask, wit))
        current = nxt
    current.sort(key=lambda t: t[0])
    masks = [m for m, _ in current]
    witnesses = [w for _, w in current]
    if len(set(masks)) != len(masks):
        raise CheckFailedError("duplicate chamber masks")
    return TopeGraph(arrangement, masks, witnesses)


def tits_product(f, g):
    """Composition of sign vectors: entries of f, with zeros filled from g."""
    if len(f) != len(g):
        raise ValueError("sign vector length mismatch")
    return tuple(fi if fi != 0 else gi for fi, gi in zip(f, g))


# ---------------------------------------------------------------------------
# intersection poset


@dataclass(frozen=True)
class Flat:
    """An intersection subspace, identified by the hyperplanes containing it."""

    index: int
    hyperplanes: tuple
    rank: int
    mobius: int

    @property
    def size(self):
        return len(self.hyperplanes)


class FaceLattice:
    """Intersection subspaces ordered by reverse inclusion.

    Rank of a flat is the codimension of the subspace, i.e. the rank of
    the normals of the hyperplanes through it.  The bottom flat is the
    empty intersection (the whole space).
    """

    def __init__(self, arrangement, flats, mobius_table, chamber_count):
        self.arrangement = arrangement
        self.flats = flats
        self.by_set = {f.hyperplanes: f.index for f in flats}
        self.mobius_table = mobius_table
        self.chamber_count = chamber_count
        self.rank = max(f.rank for f in flats)
        self._restriction_counts = {}
        self._faces = {}

    def __len__(self):
        return len(self.flats)

    def leq(self, i, j):
        a = self.flats[i].hyperplanes
        b = self.flats[j].hyperplanes
        return set(a) <= set(b)

    def mobius(self, i, j):
        """Moebius function of the interval [i, j]; zero off-interval."""
        return self.mobius_table.get((i, j), 0)

    def lower(self, j):
        """Indices of flats below or equal to flat j."""
        top = set(self.flats[j].hyperplanes)
        return [f.index for f in self.flats if set(f.hyperplanes) <= top]

    def upper(self, i):
        bot = set(self.flats[i].hyperplanes)
        return [f.index for f in self.flats if bot <= set(f.hyperplanes)]

    def interval(self, i, j):
        bot = set(self.flats[i].hyperplanes)
        top = set(self.flats[j].hyperplanes)
        return [
            f.index
            for f in self.flats
            if bot <= set(f.hyperplanes) <= top
        ]

    def flats_of_rank(self, r):
        return [f for f in self.flats if f.rank == r]

    def characteristic_polynomial(self):
        """Sum over flats of mu(0, X) t^(d - rank X), as a coeff tuple."""
        d = self.arrangement.dimension
        coeffs = [0] * (d + 1)
        for f in self.flats:
            coeffs[d - f.rank] += f.mobius
        return tuple(coeffs)

    def whitney_sum(self, j):
        """Sum of |mu(0, Y)| over Y <= flat j (chambers meeting the flat)."""
        return sum(abs(self.flats[y].mobius) for y in self.lower(j))

    def beta_invariant(self, j):
        """|chi'(1)| of the subarrangement of hyperplanes through flat j."""
        d = self.arrangement.dimension
        total = 0
        for y in self.lower(j):
            f = self.flats[y]
            total += f.mobius * (d - f.rank)
        return abs(total)

    def interval_chamber_count(self, i, j):
        """Number of chambers of the interval [i, j] seen as an arrangement.

        Equals the sum of |mu(i, Y)| over Y in the interval.
        """
        return sum(abs(self.mobius(i, y)) for y in self.interval(i, j))

    def restriction_chamber_count(self, j, graph=None):
        """Chambers of the arrangement restricted to flat j, by enumeration."""
        if j in self._restriction_counts:
            return self._restriction_counts[j]
        f = self.flats[j]
        if f.rank == 0:
            count = self.chamber_count
        else:
            sub = restrict(self.arrangement, f.hyperplanes)
            count = 1 if sub.n == 0 else len(enumerate_chambers(sub))
        self._restriction_counts[j] = count
        return count

    def rank3_line_multiplicities(self):
        """Counts {k: number of rank-2 flats through exactly k hyperplanes}."""
        out = {}
        for f in self.flats_of_rank(2):
            out[f.size] = out.get(f.size, 0) + 1
        return out


def intersection_lattice(arrangement, graph=None):
    """Build the poset of flats with its full Moebius table."""
    n = arrangement.n
    normals = arrangement.normals

    def closure(subset):
        rows = [normals[h] for h in subset]
        reduced, pivots = rref(rows)
        closed = tuple(
            h for h in range(n) if in_row_space(reduced, pivots, normals[h])
        )
        return closed, len(pivots)

    flat_sets = {}
    bottom, rank0 = closure(())
    if bottom:
        raise CheckFailedError("a nonzero normal lies in the empty span")
    flat_sets[()] = 0
    frontier = [()]
    ranks = {(): 0}
    while frontier:
        nxt = []
        for s in frontier:
            have = set(s)
            for h in range(n):
                if h in have:
                    continue
                closed, rk = closure(s + (h,))
                if closed not in flat_sets:
                    flat_sets[closed] = rk
                    nxt.append(closed)
        frontier = nxt
        ranks.update({s: flat_sets[s] for s in nxt})

    ordered = sorted(flat_sets, key=lambda s: (flat_sets[s], s))
    idx = {s: i for i, s in enumerate(ordered)}
    sets = [set(s) for s in ordered]

    # Moebius over every comparable pair, by rank-increasing recursion.
    mobius_table = {}
    for i, si in enumerate(sets):
        above = [j for j in range(len(ordered)) if si <= sets[j]]
        above.sort(key=lambda j: flat_sets[ordered[j]])
        for j in above:
            if i == j:
                mobius_table[(i, j)] = 1
                continue
            acc = 0
            for k in above:
                if k != j and sets[k] <= sets[j]:
                    acc += mobius_table[(i, k)]
            mobius_table[(i, j)] = -acc

    flats = tuple(
        Flat(
            index=i,
            hyperplanes=ordered[i],
            rank=flat_sets[ordered[i]],
            mobius=mobius_table[(0, i)],
        )
        for i in range(len(ordered))
    )
    if graph is None:
        graph = enumerate_chambers(arrangement)
    lattice = FaceLattice(arrangement, flats, mobius_table, len(graph))

    # Zaslavsky count must match the enumeration.
    total = sum(abs(f.mobius) for f in flats)
    if total != len(graph):
        raise CheckFailedError(
            f"Moebius chamber count {total} != enumerated {len(graph)}"
        )
    return lattice


# ---------------------------------------------------------------------------
# derived arrangements


def localize(arrangement, hyperplanes):
    """Subarrangement of the hyperplanes through a flat, in the same space."""
    hs = sorted(hyperplanes)
    rows = [arrangement.normals[h] for h in hs]
    labels = [arrangement.labels[h] for h in hs]
    return Arrangement(
        dimension=arrangement.dimension,
        normals=tuple(tuple(r) for r in rows),
        labels=tuple(labels),
    )


def _restrict_with_basis(arrangement, hyperplanes):
    """Restriction to a flat plus the kernel basis used as coordinates.

    Distinct hyperplanes may cut the flat in the same subspace; they are
    merged, keeping first-occurrence order.
    """
    hs = sorted(set(hyperplanes))
    rows = [arrangement.normals[h] for h in hs]
    if rows:
        basis = nullspace(rows, arrangement.dimension)
    else:
        d = arrangement.dimension
        basis = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
    new_rows = []
    new_labels = []
    seen = set()
    in_flat = set(hs)
    for h in range(arrangement.n):
        if h in in_flat:
            continue
        row = tuple(_dot(arrangement.normals[h], b) for b in basis)
        if not any(row):
            continue
        prim = _primitive_row(row)
        key, _ = _sign_canonical(prim)
        if key in seen:
            continue
        seen.add(key)
        new_rows.append(prim)
        new_labels.append(arrangement.labels[h])
    sub = Arrangement(
        dimension=len(basis),
        normals=tuple(new_rows),
        labels=tuple(new_labels),
    )
    return sub, basis


def restrict(arrangement, hyperplanes):
    """Arrangement induced on the flat cut out by the given hyperplanes."""
    sub, _ = _restrict_with_basis(arrangement, hyperplanes)
    return sub


def essentialize(arrangement):
    """Quotient by the common intersection subspace.

    Rewrites each normal in coordinates dual to a basis of the row span,
    so sign vectors of points correspond exactly before and after.
    """
    reduced, pivots = rref(list(arrangement.normals))
    r = len(pivots)
    if r == arrangement.dimension:
        return arrangement
    basis_rows = [clear_denominators(row) for row in reduced]
    new_rows = []
    for a in arrangement.normals:
        v = [Fraction(x) for x in a]
        coeffs = []
        for row, piv in zip(reduced, pivots):
            c = v[piv]
            coeffs.append(c)
            if c:
                v = [x - c * y for x, y in zip(v, row)]
        if any(v):
            raise CheckFailedError("normal outside its own row space")
        new_rows.append(clear_denominators(coeffs))
    ess = Arrangement(
        dimension=r,
        normals=tuple(new_rows),
        labels=arrangement.labels,
    )
    del basis_rows
    return ess


def direct_sum(a, b):
    """Arrangement in the product space with the two factor normal sets."""
    d1, d2 = a.dimension, b.dimension
    rows = [tuple(r) + (0,) * d2 for r in a.normals]
    rows += [(0,) * d1 + tuple(r) for r in b.normals]
    labels = tuple(f"L.{x}" for x in a.labels) + tuple(f"R.{x}" for x in b.labels)
    return Arrangement(dimension=d1 + d2, normals=rows and tuple(rows), labels=labels)


# ---------------------------------------------------------------------------
# symmetries


def tope_symmetries(graph):
    """Chamber permutations induced by signed coordinate symmetries.

    Searches every map x_k -> s_k x_{pi(k)} that permutes the hyperplane
    set, plus the antipodal map (always present for a central
    arrangement).  Returns a sorted tuple of distinct permutation
    tuples on chamber indices, always containing the identity.
    """
    arr = graph.arrangement
    d = arr.dimension
    n = arr.n

    canon = {}
    for h, a in enumerate(arr.normals):
        key, sgn = _sign_canonical(a)
        canon[key] = (h, sgn)

    def chamber_perm(hyper_map):
        # hyper_map[h] = (g, eps): sign on h of the image chamber equals
        # eps times the sign on g of the source chamber.
        perm = []
        for mask in graph.masks:
            out = 0
            for h in range(n):
                g, eps = hyper_map[h]
                bit = mask >> g & 1
                if eps < 0:
                    bit ^= 1
                out |= bit << h
            j = graph.index.get(out)
            if j is None:
                return None
            perm.append(j)
        return tuple(perm)

    def map_from_signed_perm(pi, signs):
        hyper_map = []
        for a in arr.normals:
            t = [0] * d
            for k in range(d):
                t[pi[k]] = a[k] * signs[k]
            prim = _primitive_row(t)
            key, eps = _sign_canonical(prim)
            hit = canon.get(key)
            if hit is None:
                return None
            g, sgn = hit
            hyper_map.append((g, eps * sgn))
        return hyper_map

    candidates = []
    if (1 << d) * _factorial(d) <= _SYMMETRY_SEARCH_CAP:
        perms = list(itertools.permutations(range(d)))
        sign_choices = list(itertools.product((1, -1), repeat=d))
        for pi in perms:
            for signs in sign_choices:
                candidates.append((pi, signs))
    else:
        ident = tuple(range(d))
        candidates.append((ident, (1,) * d))
        candidates.append((ident, (-1,) * d))

    found = set()
    for pi, signs in candidates:
        hyper_map = map_from_signed_perm(pi, signs)
        if hyper_map is None:
            continue
        perm = chamber_perm(hyper_map)
        if perm is not None:
            found.add(perm)

    # The antipodal chamber map is a symmetry of the metric even when
    # -I was pruned by the cap above.
    full = (1 << n) - 1
    found.add(tuple(graph.index[m ^ full] for m in graph.masks))
    found.add(tuple(range(len(graph))))
    return tuple(sorted(found))


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def orbits_of_permutations(count, perms):
    """Orbit partition of {0..count-1} under a list of permutations.

    Returns (orbit_id, orbits) where orbits is a tuple of sorted tuples
    and orbit_id[i] gives the orbit index of element i.
    """
    orbit_id = [-1] * count
    orbits = []
    for start in range(count):
        if orbit_id[start] >= 0:
            continue
        oid = len(orbits)
        stack = [start]
        members = []
        orbit_id[start] = oid
        while stack:
            u = stack.pop()
            members.append(u)
            for p in perms:
                v = p[u]
                if orbit_id[v] < 0:
                    orbit_id[v] = oid
                    stack.append(v)
        orbits.append(tuple(sorted(members)))
    return tuple(orbit_id), tuple(orbits)


def flat_orbits(lattice, perms, graph):
    """Orbit partition of flats under chamber symmetries.

    Each chamber permutation comes from a hyperplane relabelling; the
    induced map on flats permutes hyperplane subsets.  Recovered here by
    matching separation masks: hyperplane h maps to g when the set of
    chamber pairs separated by h maps to the pairs separated by g.
    """
    n = graph.n
    hyper_perms = []
    for p in perms:
        hp = _hyperplane_perm_of(graph, p)
        if hp is not None:
            hyper_perms.append(hp)
    flats = lattice.flats
    index_of = {f.hyperplanes: f.index for f in flats}
    fperms = []
    for hp in hyper_perms:
        fp = []
        ok = True
        for f in flats:
            image = tuple(sorted(hp[h] for h in f.hyperplanes))
            j = index_of.get(image)
            if j is None:
                ok = False
                break
            fp.append(j)
        if ok:
            fperms.append(tuple(fp))
    return orbits_of_permutations(len(flats), fperms)


def _hyperplane_perm_of(graph, perm):
    """Hyperplane relabelling realizing a chamber permutation, if any.

    For adjacent chambers across hyperplane h, the image chambers are
    adjacent across a single hyperplane g; the map h -> g must be a
    permutation consistent across all edges.
    """
    n = graph.n
    hmap = [-1] * n
    for i, j in graph.edges():
        sep = graph.masks[i] ^ graph.masks[j]
        h = sep.bit_length() - 1
        isep = graph.masks[perm[i]] ^ graph.masks[perm[j]]
        if isep.bit_count() != 1:
            return None
        g = isep.bit_length() - 1
        if hmap[h] == -1:
            hmap[h] = g
        elif hmap[h] != g:
            return None
    if -1 in hmap or len(set(hmap)) != n:
        return None
    return tuple(hmap)
