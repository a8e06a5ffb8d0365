"""Exact linear algebra helpers: rational elimination, a small simplex for
strict sign feasibility, and Smith normal form over the integers.

Rationals use gmpy2.mpq when available (same values, faster), falling back
to fractions.Fraction.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from fractions import Fraction

try:
    from gmpy2 import mpq as RAT
except ImportError:  # pragma: no cover - gmpy2 is normally present
    RAT = Fraction


def rref(rows):
    """Reduced row echelon form over Q.

    Returns (reduced nonzero rows, pivot column indices). Input rows are
    sequences of ints or rationals; the input is not modified.
    """
    mat = [[RAT(x) for x in row] for row in rows]
    ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def matrix_rank(rows) -> int:
    return len(rref(rows)[1])


def in_row_space(reduced, pivots, vec) -> bool:
    """Membership of vec in the span of already-reduced rows."""
    v = [RAT(x) for x in vec]
    for row, c in zip(reduced, pivots):
        f = v[c]
        if f != 0:
            v = [a - f * b for a, b in zip(v, row)]
    return all(x == 0 for x in v)

def nullspace(rows, ncols):
    """Basis of the right kernel, as integer vectors with content 1."""
    reduced, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [RAT(0)] * ncols
        v[fc] = RAT(1)
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[fc]
        basis.append(clear_denominators(v))
    return basis


def clear_denominators(vec):
    """Scale a rational vector to a primitive integer vector (same direction)."""
    fr = [Fraction(int(x.numerator), int(x.denominator)) if not isinstance(x, Fraction) else x
          for x in vec]
    lcm = 1
    for f in fr:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    ints = [int(f * lcm) for f in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def strict_feasible(rows):
    """Exact strict feasibility of {x : a.x > 0 for every row a}.

    Maximizes a margin t subject to a.x >= t and the box -1 <= x_k <= 1
    (regions are cones, so the box loses nothing); the system is strictly
    feasible iff the optimum is positive.  Single-phase primal simplex with
    Bland's rule; x is split into nonnegative parts.  Returns a primitive
    integer witness vector, or None.
    """
    if not rows:
        return (0,) * 0
    d = len(rows[0])
    m = len(rows)
    nvars = 2 * d + 1  # x+, x-, t
    nslack = m + 2 * d + 1
    ncols = nvars + nslack + 1  # + rhs
    tab = []
    for a in rows:
        row = [RAT(0)] * ncols
        for k in range(d):
            row[k] = RAT(-a[k])
            row[d + k] = RAT(a[k])
        row[2 * d] = RAT(1)
        tab.append(row)
    for k in range(2 * d):  # x+_k <= 1, x-_k <= 1
        row = [RAT(0)] * ncols
        row[k] = RAT(1)
        row[-1] = RAT(1)
        tab.append(row)
    row = [RAT(0)] * ncols
    row[2 * d] = RAT(1)
    row[-1] = RAT(1)
    tab.append(row)
    for i in range(nslack):
        tab[i][nvars + i] = RAT(1)
    obj = [RAT(0)] * ncols
    obj[2 * d] = RAT(-1)  # maximize t: keep -t, stop when it goes negative
    basis = [nvars + i for i in range(nslack)]

    def solution_t():
        # pivot updates accumulate the objective value in the rhs slot
        return obj[-1]

    while True:
        if solution_t() > 0:
            break
        enter = None
        for j in range(nvars + nslack):
            if obj[j] < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(nslack):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("unbounded feasibility program")
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(nslack):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [a - f * b for a, b in zip(obj, tab[leave])]
        basis[leave] = enter

    if solution_t() <= 0:
        return None
    vals = {}
    for i, b in enumerate(basis):
        vals[b] = tab[i][-1]
    x = [Fraction(int((vals.get(k, RAT(0)) - vals.get(d + k, RAT(0))).numerator),
                  int((vals.get(k, RAT(0)) - vals.get(d + k, RAT(0))).denominator))
         for k in range(d)]
    witness = clear_denominators(x)
    for a in rows:
        if sum(ai * wi for ai, wi in zip(a, witness)) <= 0:
            raise AssertionError("simplex returned an invalid witness")
    return witness


def snf_diagonal(entries, nrows, ncols):
    """Diagonal entries of the Smith normal form of a sparse integer matrix.

    ``entries`` maps (i, j) to a nonzero int.  Returns the positive diagonal
    entries with the divisibility chain d1 | d2 | ... (no zeros, no padding),
    so rank = len(result) and torsion corresponds to entries > 1.
    """
    rows = {}
    cols = {}
    for (i, j), v in entries.items():
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, set()).add(i)

    def drop(i, j):
        r = rows.get(i)
        if r and j in r:
            del r[j]
            if not r:
                del rows[i]
        c = cols.get(j)
        if c:
            c.discard(i)
            if not c:
                del cols[j]

    def put(i, j, v):
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, set()).add(i)
        else:
            drop(i, j)

    def add_row(src, dst, mult):
        # row dst += mult * row src
        for j, v in list(rows.get(src, {}).items()):
            put(dst, j, rows.get(dst, {}).get(j, 0) + mult * v)

    def add_col(src, dst, mult):
        for i in list(cols.get(src, set())):
            v = rows[i][src]
            put(i, dst, rows.get(i, {}).get(dst, 0) + mult * v)

    diag = []
    while rows:
        # pivot selection: unit entries first, then smallest magnitude,
        # breaking ties by least fill (Markowitz) and then by index.
        best = None
        for i, r in rows.items():
            rn = len(r)
            for j, v in r.items():
                av = abs(v)
                key = (0 if av == 1 else 1, av, (rn - 1) * (len(cols[j]) - 1), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
                    if key[0] == 0 and key[2] == 0:
                        break
            else:
                continue
            if best[0][0] == 0 and best[0][2] == 0:
                break
        _, pi, pj = best
        # make the pivot divide everything in its row and column
        while True:
            pv = rows[pi][pj]
            off = None
            for i in list(cols[pj]):
                if i != pi and rows[i][pj] % pv != 0:
                    off = ("row", i)
                    break
            if off is None:
                for j, v in list(rows[pi].items()):
                    if j != pj and v % pv != 0:
                        off = ("col", j)
                        break
            if off is None:
                break
            kind, idx = off
            if kind == "row":
                qv = rows[idx][pj] // pv
                add_row(pi, idx, -qv)
                # remainder is smaller than pivot: swap roles
                if rows.get(idx, {}).get(pj):
                    pi = idx
            else:
                qv = rows[pi][idx] // pv
                add_col(pj, idx, -qv)
                if rows.get(pi, {}).get(idx):
                    pj = idx
        pv = rows[pi][pj]
        for i in list(cols[pj]):
            if i != pi:
                add_row(pi, i, -(rows[i][pj] // pv))
        for j in list(rows[pi].keys()):
            if j != pj:
                add_col(pj, j, -(rows[pi][j] // pv))
        drop(pi, pj)
        diag.append(abs(pv))
    # massage an arbitrary diagonal into the divisibility chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            g = math.gcd(a, b)
            diag[i], diag[j] = g, a // g * b
    return tuple(sorted(diag))


def snf_summary(entries, nrows, ncols):
    """(rank, invariant factors greater than 1) of a sparse integer matrix."""
    diag = snf_diagonal(entries, nrows, ncols)
    return len(diag), tuple(d for d in diag if d > 1)


_DEGREE_SHIFT = 48


def complex_homology(dims, boundaries, want_torsion=True):
    """Integral homology of a finite free chain complex.

    ``dims`` maps degree to basis size; ``boundaries`` maps degree k to
    the sparse columns {col: {row: coefficient}} of the map into degree
    k - 1.  A unit incidence (b, c) spans an acyclic two-term summand
    after a change of basis, so both cells can be cancelled at the cost
    of a Schur update on the other columns through b.  Pairs are
    consumed cheapest first; whatever survives has no unit entries left
    and is finished by Smith normal form.  Returns
    {degree: (betti, torsion factors of the incoming map)}.
    """
    # cells get one integer id: degree in the high bits, index below
    bnd = {}
    cob = {}
    alive = dict(dims)
    for k, colmap in boundaries.items():
        hi = k << _DEGREE_SHIFT
        lo = (k - 1) << _DEGREE_SHIFT
        for j, col in colmap.items():
            if not col:
                continue
            c = hi + j
            d = {}
            for i, v in col.items():
                b = lo + i
                d[b] = v
                s = cob.get(b)
                if s is None:
                    s = cob[b] = set()
                s.add(c)
            bnd[c] = d
    heap = []
    for c, d in bnd.items():
        lc = len(d) - 1
        for b, v in d.items():
            if v == 1 or v == -1:
                heap.append((lc * (len(cob[b]) - 1), b, c))
    heapq.heapify(heap)
    while heap:
        cost, b, c = heapq.heappop(heap)
        col = bnd.get(c)
        if col is None:
            continue
        eps = col.get(b, 0)
        if eps != 1 and eps != -1:
            continue
        cur = (len(col) - 1) * (len(cob[b]) - 1)
        if cur > cost:
            heapq.heappush(heap, (cur, b, c))
            continue
        del bnd[c]
        del col[b]
        for y in cob.pop(c, ()):
            by = bnd.get(y)
            if by is not None:
                by.pop(c, None)
        ups = cob.pop(b)
        ups.discard(c)
        for x in ups:
            bx = bnd[x]
            f = bx.pop(b)
            if col:
                fac = f if eps == 1 else -f
                for t, v in col.items():
                    nv = bx.get(t, 0) - fac * v
                    if nv:
                        bx[t] = nv
                        cob[t].add(x)
                        if nv == 1 or nv == -1:
                            heapq.heappush(
                                heap,
                                ((len(bx) - 1) * (len(cob[t]) - 1), t, x),
                            )
                    else:
                        del bx[t]
                        cob[t].discard(x)
            if not bx:
                del bnd[x]
        for t in col:
            s = cob.get(t)
            if s is not None:
                s.discard(c)
                if not s:
                    del cob[t]
        bb = bnd.pop(b, None)
        if bb:
            for t in bb:
                s = cob.get(t)
                if s is not None:
                    s.discard(b)
                    if not s:
                        del cob[t]
        kc = c >> _DEGREE_SHIFT
        alive[kc] -= 1
        alive[kc - 1] -= 1
    ranks = {}
    tors = {}
    if bnd:
        row_index = {}
        row_count = defaultdict(int)
        col_count = defaultdict(int)
        core = defaultdict(dict)
        for c in sorted(bnd):
            k = c >> _DEGREE_SHIFT
            j = col_count[k]
            col_count[k] += 1
            for b, v in bnd[c].items():
                i = row_index.get(b)
                if i is None:
                    i = row_index[b] = row_count[k]
                    row_count[k] += 1
                core[k][(i, j)] = v
        for k, entries in core.items():
            diag = snf_diagonal(entries, row_count[k], col_count[k])
            ranks[k] = len(diag)
            tors[k] = tuple(x for x in diag if x > 1)
    out = {}
    for k in dims:
        betti = alive.get(k, 0) - ranks.get(k, 0) - ranks.get(k + 1, 0)
        out[k] = (betti, tors.get(k + 1, ()) if want_torsion else ())
    return out
