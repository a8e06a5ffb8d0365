"""Magnitude of an arrangement as an exact rational function in q.

The similarity matrix of the chamber metric has entries q^(distance).
Magnitude is the sum of the entries of its inverse applied to the all-
ones vector.  Symmetries of the arrangement act on chambers and commute
with the matrix, so the solution is constant on orbits; the computation
collapses to one row per orbit.  At q = 0 the collapsed matrix is the
identity, so fraction-free elimination never needs to pivot and every
exact division is by a polynomial with unit constant term.
"""

from dataclasses import dataclass, field

from .arrangement import (
    enumerate_chambers,
    intersection_lattice,
    orbits_of_permutations,
    tope_symmetries,
)
from .errors import CheckFailedError
from .linalg import matrix_rank
from .polyq import (
    ONE,
    RAT_ONE,
    RAT_ZERO,
    IntPoly,
    RatFunc,
    ZERO,
    cyclotomic_factor,
    is_denominator_cyclotomic,
    reduce_fraction,
    reverse_substitute,
    series_expand,
)

# magnitude series are reported through this power of q (11 coefficients)
SERIES_ORDER = 10


def _bareiss_minors(matrix):
    """Leading principal minors by fraction-free forward elimination.

    ``matrix`` is a square list of IntPoly rows, possibly with extra
    columns on the right which are carried along.  Requires every
    leading principal minor except possibly the last to be nonzero,
    which holds here because the systems solved have constant term
    equal to an identity matrix.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    prev = ONE
    minors = []
    for k in range(n):
        pk = a[k][k]
        if not pk and k < n - 1:
            raise CheckFailedError("zero pivot in fraction-free elimination")
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, len(row_i)):
                num = pk * row_i[j] - aik * row_k[j]
                row_i[j] = num.divexact_unit(prev)
            row_i[k] = ZERO
        minors.append(pk)
        prev = pk
    return minors


def chamber_orbits(graph, perms=None):
    """Orbit ids, orbit member lists, and the symmetry list used."""
    if perms is None:
        perms = tope_symmetries(graph)
    orbit_id, orbits = orbits_of_permutations(len(graph), perms)
    return orbit_id, orbits, perms


def _orbit_matrix(graph, orbits):
    """Collapsed similarity matrix: one row per orbit representative."""
    reps = [o[0] for o in orbits]
    m = []
    for r in reps:
        row = []
        for o in orbits:
            counts = {}
            for c in o:
                dd = graph.dist(r, c)
                counts[dd] = counts.get(dd, 0) + 1
            deg = max(counts)
            coeffs = [counts.get(k, 0) for k in range(deg + 1)]
            row.append(IntPoly(coeffs))
        m.append(row)
    return m


def magnitude_fraction(graph, perms=None):
    """Magnitude as a reduced fraction of integer polynomials.

    Solves the collapsed system with a single bordered fraction-free
    elimination: the next-to-last minor is the system determinant and
    the last is (minus) the weighted solution sum times it.
    """
    orbit_id, orbits, perms = chamber_orbits(graph, perms)
    m = _orbit_matrix(graph, orbits)
    k = len(orbits)
    for i in range(k):
        m[i].append(ONE)
    weights = [IntPoly.const(len(o)) for o in orbits] + [ZERO]
    m.append(weights)
    minors = _bareiss_minors(m)
    det_m = minors[k - 1]
    det_border = minors[k]
    return reduce_fraction(-det_border, det_m)


@dataclass
class MagnitudeResult:
    """Magnitude with its alternate-route values and structural checks."""

    chamber_count: int
    n: int
    rank: int
    magnitude: RatFunc
    interior: RatFunc
    series: tuple
    interior_series: tuple
    cyclotomic_den: tuple
    orbit_count: int
    symmetry_order: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())


def interior_magnitude(mag, rank, n):
    """Sign-and-shift companion of magnitude: (-1)^rank q^n times it."""
    sign = -1 if rank % 2 else 1
    num = mag.num.shift(n) * sign
    return reduce_fraction(num, mag.den)


def magnitude_direct(arrangement, graph=None, perms=None, lattice=None,
                     face_check=True):
    """Magnitude with structural checks, computed from the chamber metric.

    When ``face_check`` is set, the value is recomputed independently
    through the face decomposition over the flat poset (and, for rank
    three, the closed form) and compared entry by entry.
    """
    if graph is None:
        graph = enumerate_chambers(arrangement)
    orbit_id, orbits, perms = chamber_orbits(graph, perms)
    mag = magnitude_fraction(graph, perms)
    n = arrangement.n
    rank = matrix_rank(arrangement.normals)
    interior = interior_magnitude(mag, rank, n)
    series = series_expand(mag, SERIES_ORDER)
    interior_series = series_expand(interior, SERIES_ORDER)
    cyc_ok, cyc_factors = is_denominator_cyclotomic(mag.den)

    checks = {}
    checks["series_integral"] = series.integral and interior_series.integral
    checks["one_point_property"] = mag.evaluate(1) == 1
    checks["degree_gap_is_n"] = mag.degree_gap() == n
    checks["palindromic_num"] = mag.num.is_palindromic()
    checks["palindromic_den"] = mag.den.is_palindromic()
    checks["cyclotomic_denominator"] = cyc_ok
    shifted = reduce_fraction(mag.num.shift(n), mag.den)
    checks["inversion_symmetry"] = reverse_substitute(mag) == shifted
    checks["series_chamber_count"] = series[0] == len(graph)
    checks["series_edge_count"] = series[1] == -2 * len(graph.edges())
    checks["interior_at_one"] = interior.evaluate(1) == (-1) ** rank

    if face_check:
        if lattice is None:
            lattice = intersection_lattice(arrangement, graph)
        via_faces = magnitude_by_face_decomposition(lattice)
        checks["face_decomposition_route"] = via_faces == mag
        if lattice.rank == 3:
            stats = Rank3Stats.from_lattice(lattice)
            checks["rank3_closed_form"] = rank3_magnitude(stats) == mag

    return MagnitudeResult(
        chamber_count=len(graph),
        n=n,
        rank=rank,
        magnitude=mag,
        interior=interior,
        series=tuple(series),
        interior_series=tuple(interior_series),
        cyclotomic_den=cyc_factors,
        orbit_count=len(orbits),
        symmetry_order=len(perms),
        checks=checks,
    )


# ---------------------------------------------------------------------------
# face decomposition route


def _flat_interior_term(lattice, y, mag_y):
    f = lattice.flats[y]
    sign = -1 if f.rank % 2 else 1
    shift = RatFunc.of(IntPoly.monomial(f.size, sign))
    return shift * mag_y


def magnitude_by_face_decomposition(lattice, enumerated_top=True):
    """Magnitude via the recursion over localizations at flats.

    Every face of the arrangement is a chamber of the restriction to
    the flat it spans, so magnitude satisfies, for each flat X,

        Mag(A_X) = sum over Y <= X of  c^Y [Y,X] * (-1)^rank(Y) q^#Y Mag(A_Y)

    where c^Y[Y,X] counts chambers of the restriction of A_X to Y.
    Solving for the X term gives the recursion used here.  For flats
    below the top, c^Y[Y,X] is the interval Moebius sum; at the top
    level the counts are taken from actual restriction enumerations
    when ``enumerated_top`` is set, which crosses the two routes.
    """
    flats = lattice.flats
    top = flats[-1]
    if top.size != lattice.arrangement.n:
        raise CheckFailedError("top flat misses some hyperplanes")
    mag_of = {0: RAT_ONE}
    if flats[0].rank != 0:
        raise CheckFailedError("first flat is not the bottom")
    for f in flats[1:]:
        x = f.index
        use_enum = enumerated_top and f.index == top.index
        acc = RAT_ZERO
        for y in lattice.lower(x):
            if y == x:
                continue
            if use_enum:
                c = lattice.restriction_chamber_count(y)
            else:
                c = lattice.interval_chamber_count(y, x)
            acc = acc + _flat_interior_term(lattice, y, mag_of[y]) * c
        sign = -1 if f.rank % 2 else 1
        den = RatFunc.of(ONE - IntPoly.monomial(f.size, sign))
        mag_of[x] = acc / den
    mag = mag_of[top.index]
    return reduce_fraction(mag.num, mag.den)


# ---------------------------------------------------------------------------
# rank-three closed form


@dataclass(frozen=True)
class Rank3Stats:
    """Combinatorial data determining magnitude in rank three.

    ``line_weights`` maps the number of hyperplanes through a rank-two
    flat to the total chamber count of the restrictions to such flats.
    Each restriction is a point on a line, contributing two chambers,
    so the weight is twice the number of flats of that size.
    """

    n: int
    chambers: int
    line_weights: dict

    @staticmethod
    def from_lattice(lattice):
        if lattice.rank != 3:
            raise ValueError("rank-three statistics need a rank-three poset")
        weights = {
            k: 2 * v for k, v in lattice.rank3_line_multiplicities().items()
        }
        return Rank3Stats(
            n=lattice.arrangement.n,
            chambers=lattice.chamber_count,
            line_weights=weights,
        )


# 18 lines, 216 chambers, 30 ordinary and 92 triple points: statistics of
# a line arrangement whose series coefficients stop alternating in sign.
EIGHTEEN_LINES = Rank3Stats(n=18, chambers=216, line_weights={2: 30, 3: 92})


def rank3_magnitude(stats):
    """Closed form for essential rank-three arrangements.

    Needs only the hyperplane count, the chamber count, and the line
    weights; no chamber enumeration.
    """
    q = IntPoly.monomial(1)
    acc = RatFunc.of(IntPoly.const(stats.chambers))
    one_plus_q = ONE + q
    for k, weight in sorted(stats.line_weights.items()):
        num = IntPoly.monomial(1, 2 * k * weight) * (ONE - IntPoly.monomial(k - 1))
        den = one_plus_q * (ONE - IntPoly.monomial(k))
        acc = acc - RatFunc(num, den)
    total_den = ONE + IntPoly.monomial(stats.n)
    acc = acc / RatFunc.of(total_den)
    return reduce_fraction(acc.num, acc.den)


def alternating_violation(series):
    """First index where the sign pattern (-1)^l breaks, or None."""
    for i, c in enumerate(series):
        if c and (c > 0) != (i % 2 == 0):
            return i
    return None


# ---------------------------------------------------------------------------
# determinant of the full similarity matrix


def varchenko_matrix(graph):
    """Full chamber-by-chamber matrix of q powers (small inputs only)."""
    size = len(graph)
    return [
        [IntPoly.monomial(graph.dist(i, j)) for j in range(size)]
        for i in range(size)
    ]


def varchenko_det(graph):
    """Exact determinant, split over the antipodal pairing.

    The antipodal map is a fixed-point-free involution commuting with
    the metric, so in a paired basis the matrix is [[A, B], [B, A]] and
    the determinant factors as det(A+B) det(A-B).  Both factors are
    identity at q = 0, so fraction-free elimination runs pivot-free.
    """
    size = len(graph)
    n = graph.n
    reps = [i for i in range(size) if graph.masks[i] < graph.masks[graph.antipode(i)]]
    if 2 * len(reps) != size:
        raise CheckFailedError("antipodal map has a fixed chamber")
    plus = []
    minus = []
    for i in reps:
        row_p = []
        row_m = []
        for j in reps:
            d = graph.dist(i, j)
            near = IntPoly.monomial(d)
            far = IntPoly.monomial(n - d)
            row_p.append(near + far)
            row_m.append(near - far)
        plus.append(row_p)
        minus.append(row_m)
    det_p = _bareiss_minors(plus)[-1] if plus else ONE
    det_m = _bareiss_minors(minus)[-1] if minus else ONE
    return det_p * det_m


def varchenko_det_product(lattice):
    """Determinant from the flat data: product over flats above bottom of
    (1 - q^(2 #X)) raised to c^X times the beta invariant of the
    localization at X."""
    out = ONE
    for f in lattice.flats[1:]:
        beta = lattice.beta_invariant(f.index)
        if beta == 0:
            continue
        c = lattice.restriction_chamber_count(f.index)
        base = ONE - IntPoly.monomial(2 * f.size)
        out = out * base ** (c * beta)
    return out


def varchenko_det_check(graph, lattice):
    """Compare the eliminated determinant with the product formula."""
    direct = varchenko_det(graph)
    predicted = varchenko_det_product(lattice)
    return direct == predicted, direct, predicted


# ---------------------------------------------------------------------------
# distance profile


def distance_profile(graph):
    """Per-chamber generating polynomials of distances to all chambers."""
    rows = []
    for i in range(len(graph)):
        counts = [0] * (graph.n + 1)
        for j in range(len(graph)):
            counts[graph.dist(i, j)] += 1
        rows.append(IntPoly(counts))
    return rows


def profile_uniform(graph):
    """Whether every chamber sees the same distance profile.

    A uniform profile is implied by a vertex-transitive symmetry group,
    so non-uniformity certifies non-transitivity; the converse need not
    hold.
    """
    rows = distance_profile(graph)
    distinct = {r.coeffs for r in rows}
    return len(distinct) == 1, len(distinct)
