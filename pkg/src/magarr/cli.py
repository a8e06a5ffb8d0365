"""Command line front end: compute, cache, report, verify.

One task per invocation: ``magarr <task> <source>`` with a task out of
mag, homology, lattice, verify, conjectures.  A source is a catalog
name or a file of normals, either JSON ({"dimension": d, "normals":
[["p/q", ...], ...], "labels": [...]}) or a whitespace-separated
matrix, one hyperplane per row, with # comments.

Reports are deterministic: the same job produces the same bytes, so
timing and cache notes go to stderr only.  Rational numbers in JSON
are rendered as "p/q" strings.
"""

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .arrangement import (
    CATALOG_NAMES,
    FaceLattice,
    Flat,
    TopeGraph,
    _sign_canonical,
    catalog,
    enumerate_chambers,
    intersection_lattice,
    parse_arrangement,
)
from .errors import BudgetExceededError, CheckFailedError, MagarrError, ParseError
from .homology import (
    boolean_diagonality,
    conjecture_probes,
    default_length_cap,
    diagonal_betti_formula,
    face_decomposition_check,
    four_cut_minimum,
    geodesic_betti_formula,
    geodesic_homology_direct,
    interior_diagonal_boolean,
    magnitude_homology,
    reciprocity_check,
    small_length_identities,
)
from .magnitude import chamber_orbits, magnitude_direct, varchenko_det_check
from .polyq import series_expand

TASKS = ("mag", "homology", "lattice", "verify", "conjectures")
SCHEMA_VERSION = 1
DET_CHECK_AUTO_LIMIT = 60
GEODESIC_CHECK_LIMIT = 60
FOUR_CUT_LIMIT = 60


@dataclass
class JobSpec:
    """One batch request; the CLI builds exactly one per invocation."""

    source: str
    tasks: tuple
    lmax: int = None
    det_check: bool = None  # None: run when the graph is small enough
    face_check: bool = True
    geodesic_check: bool = True
    json_path: str = None
    cache_dir: str = None

    def __post_init__(self):
        if not self.tasks:
            raise ParseError("a job needs at least one task")
        for t in self.tasks:
            if t not in TASKS:
                raise ParseError(f"unknown task {t!r}")
        if self.lmax is not None and self.lmax < 0:
            raise ParseError("--lmax must be nonnegative")


# ---------------------------------------------------------------------------
# sources

def load_arrangement(source):
    """Resolve a catalog name, or read a normals file.

    Returns (arrangement, display name, is_file).  File fixtures are
    keyed by the file stem, so a file named "A(7,1).txt" is matched
    against the shipped fixture of that name.
    """
    if os.path.exists(source):
        name = os.path.splitext(os.path.basename(source))[0]
        with open(source) as fh:
            text = fh.read()
        if text.lstrip().startswith("{"):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{source}: bad JSON ({exc})") from None
            rows = data.get("normals")
            if not rows:
                raise ParseError(f"{source}: missing 'normals'")
            arr = parse_arrangement(rows, labels=data.get("labels"), name=name)
            want_d = data.get("dimension")
            if want_d is not None and want_d != arr.dimension:
                raise ParseError(
                    f"{source}: dimension {want_d} != row length {arr.dimension}"
                )
        else:
            rows = []
            for line in text.splitlines():
                line = line.split("#", 1)[0].strip()
                if line:
                    rows.append(line.split())
            arr = parse_arrangement(rows, name=name)
        return arr, name, True
    key = source.strip()
    for cname in CATALOG_NAMES:
        if cname.lower() == key.lower():
            key = cname
            break
    return catalog(source), key, False


# ---------------------------------------------------------------------------
# lattice cache

def cache_key(arrangement):
    """Content hash of the arrangement, stable under row reordering.

    Rows are reduced to primitive sign-canonical integer vectors and
    sorted before hashing.
    """
    rows = sorted(_sign_canonical(r)[0] for r in arrangement.normals)
    text = f"d={arrangement.dimension};" + ";".join(
        ",".join(str(x) for x in row) for row in rows
    )
    return hashlib.sha256(text.encode()).hexdigest()


def _rat(text):
    f = Fraction(text)
    return int(f) if f.denominator == 1 else f


def _geometry_payload(arrangement, graph, lattice):
    return {
        "version": SCHEMA_VERSION,
        "dimension": arrangement.dimension,
        "rows": [[str(x) for x in row] for row in arrangement.normals],
        "masks": list(graph.masks),
        "witnesses": [[str(x) for x in w] for w in graph.witnesses],
        "flats": [
            {"hyperplanes": list(f.hyperplanes), "rank": f.rank, "mobius": f.mobius}
            for f in lattice.flats
        ],
        "mobius": [[i, j, v] for (i, j), v in sorted(lattice.mobius_table.items())],
        "chambers": lattice.chamber_count,
    }


def _geometry_from_payload(arrangement, data):
    if data.get("version") != SCHEMA_VERSION:
        raise ParseError("cache schema version mismatch")
    if data["rows"] != [[str(x) for x in row] for row in arrangement.normals]:
        # same canonical key, different presentation: not reusable
        raise ParseError("cache entry stored for a different row presentation")
    masks = [int(m) for m in data["masks"]]
    if len(masks) != data["chambers"]:
        raise ParseError("cache entry is inconsistent")
    witnesses = [tuple(_rat(x) for x in w) for w in data["witnesses"]]
    graph = TopeGraph(arrangement, masks, witnesses)
    flats = tuple(
        Flat(index=i, hyperplanes=tuple(f["hyperplanes"]), rank=f["rank"],
             mobius=f["mobius"])
        for i, f in enumerate(data["flats"])
    )
    table = {(i, j): v for i, j, v in data["mobius"]}
    lattice = FaceLattice(arrangement, flats, table, data["chambers"])
    return graph, lattice


def get_geometry(arrangement, cache_dir):
    """Chambers and flats, through the cache when one is configured."""
    if not cache_dir:
        graph = enumerate_chambers(arrangement)
        return graph, intersection_lattice(arrangement, graph), "off"
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, cache_key(arrangement) + ".json")
    if os.path.exists(path):
        try:
            with open(path) as fh:
                data = json.load(fh)
            graph, lattice = _geometry_from_payload(arrangement, data)
            return graph, lattice, "hit"
        except Exception as exc:  # corrupt or stale: recompute and overwrite
            print(f"cache: discarding {path}: {exc}", file=sys.stderr)
    graph = enumerate_chambers(arrangement)
    lattice = intersection_lattice(arrangement, graph)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(_geometry_payload(arrangement, graph, lattice), fh,
                      sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return graph, lattice, "miss"


# ---------------------------------------------------------------------------
# golden fixtures

def _golden(fname):
    try:
        text = resources.files("magarr").joinpath("golden").joinpath(
            fname
        ).read_text()
    except FileNotFoundError:
        return {}
    return json.loads(text)


def _parse_cells(table):
    return {
        tuple(int(x) for x in key.split(",")): v for key, v in table.items()
    }


def golden_magnitude():
    return _golden("magnitude.json")


def golden_betti():
    return _golden("betti.json")


def golden_extras():
    return _golden("extras.json")


# ---------------------------------------------------------------------------
# task runners

def _cells_out(table):
    return {f"{k},{l}": v for (k, l), v in sorted(table.items()) if v}


def _torsion_out(table):
    return {f"{k},{l}": list(v) for (k, l), v in sorted(table.items())}


def _maybe_det(job, graph, lattice):
    if job.det_check is False:
        return None
    if job.det_check or len(graph) <= DET_CHECK_AUTO_LIMIT:
        ok, _, _ = varchenko_det_check(graph, lattice)
        return ok
    return None


def _mag_task(job, arrangement, graph, lattice, perms):
    res = magnitude_direct(arrangement, graph, perms=perms, lattice=lattice,
                           face_check=job.face_check)
    out = {
        "magnitude": {"num": list(res.magnitude.num.coeffs),
                      "den": list(res.magnitude.den.coeffs)},
        "interior": {"num": list(res.interior.num.coeffs),
                     "den": list(res.interior.den.coeffs)},
        "series": list(res.series),
        "interior_series": list(res.interior_series),
        "cyclotomic_denominator": [[k, m] for k, m in res.cyclotomic_den],
        "orbit_count": res.orbit_count,
        "symmetry_order": res.symmetry_order,
        "checks": dict(res.checks),
    }
    det = _maybe_det(job, graph, lattice)
    if det is not None:
        out["checks"]["varchenko_det_product"] = det
    return out, res


def _homology_task(job, arrangement, graph, lattice, perms, mag_res):
    lmax = job.lmax if job.lmax is not None else default_length_cap(graph)
    expected = mag_res.series
    if lmax >= len(expected):
        expected = series_expand(mag_res.magnitude, lmax)
    res = magnitude_homology(arrangement, graph, lmax=lmax, perms=perms,
                             expected_euler=expected)
    out = {
        "lmax": res.lmax,
        "betti": _cells_out(res.betti),
        "torsion": _torsion_out(res.torsion),
        "interior_betti": _cells_out(res.interior_betti),
        "interior_torsion": _torsion_out(res.interior_torsion),
        "checks": dict(res.checks),
    }
    if len(graph) <= FOUR_CUT_LIMIT:
        out["four_cut_min"] = four_cut_minimum(graph, perms=perms)
    return out, res


def _lattice_task(lattice):
    flats = []
    for f in lattice.flats:
        flats.append({
            "hyperplanes": list(f.hyperplanes),
            "rank": f.rank,
            "mobius": f.mobius,
            "restriction_chambers": lattice.restriction_chamber_count(f.index),
        })
    return {
        "rank": lattice.rank,
        "chambers": lattice.chamber_count,
        "characteristic_polynomial": list(lattice.characteristic_polynomial()),
        "flats": flats,
    }


def _conjectures_task(job, arrangement, graph, lattice, perms, mag_res):
    lmax = job.lmax if job.lmax is not None else default_length_cap(graph)
    hom = magnitude_homology(arrangement, graph, lmax=lmax, perms=perms,
                             verify_d2=False)
    return conjecture_probes(arrangement, graph, lattice, mag_res, hom)


def _verify_task(job, arrangement, name, is_file, graph, lattice, perms):
    """Full structural suite plus golden diffs for the source."""
    checks = {}
    golden = {}
    mag = magnitude_direct(arrangement, graph, perms=perms, lattice=lattice,
                           face_check=job.face_check)
    for key, val in mag.checks.items():
        checks[f"mag:{key}"] = val
    det = _maybe_det(job, graph, lattice)
    if det is not None:
        checks["mag:varchenko_det_product"] = det

    gm = None if is_file else golden_magnitude().get(name)
    if gm is not None:
        diff = []
        if list(mag.magnitude.num.coeffs) != gm["num"]:
            diff.append("num")
        if list(mag.magnitude.den.coeffs) != gm["den"]:
            diff.append("den")
        if list(mag.series) != gm["series"]:
            diff.append("series")
        checks["golden:magnitude"] = not diff
        if diff:
            golden["magnitude_diff"] = diff
    extra = golden_extras().get(name) if is_file else None
    if extra is not None:
        checks["golden:series"] = list(mag.series) == extra["series"]

    fixture = None if is_file else golden_betti().get(name)
    if fixture is None and extra is not None and "betti" in extra:
        fixture = extra
    if job.lmax is not None:
        lmax = job.lmax
    elif fixture is not None:
        lmax = fixture["lmax"]
    else:
        lmax = default_length_cap(graph)
    expected = mag.series
    if lmax >= len(expected):
        expected = series_expand(mag.magnitude, lmax)
    hom = None
    try:
        hom = magnitude_homology(arrangement, graph, lmax=lmax, perms=perms,
                                 verify_d2=True, expected_euler=expected)
        checks["hom:boundary_squares_to_zero"] = True
    except CheckFailedError:
        checks["hom:boundary_squares_to_zero"] = False
    if hom is not None:
        for key, val in hom.checks.items():
            checks[f"hom:{key}"] = val
        if job.geodesic_check and len(graph) <= GEODESIC_CHECK_LIMIT:
            direct, gtor = geodesic_homology_direct(graph, lmax, perms)
            formula = geodesic_betti_formula(lattice)
            checks["hom:geodesic_two_routes"] = not gtor and {
                k: v for k, v in direct.items() if v
            } == {k: v for k, v in formula.items() if v and k[1] <= lmax}
        for key, val in small_length_identities(hom, lattice).items():
            checks[f"hom:{key}"] = val
        diag = diagonal_betti_formula(lattice, lmax)
        checks["hom:diagonal_formula"] = all(
            hom.betti_at(l, l) == diag.get(l, 0) for l in range(lmax + 1)
        )
        for key, val in boolean_diagonality(hom, lattice).items():
            checks[f"hom:{key}"] = val
        n = arrangement.n
        rank = lattice.rank
        if rank == n:
            want = interior_diagonal_boolean(rank, lmax)
            checks["hom:interior_diagonal_boolean"] = all(
                hom.interior_betti.get((l, l), 0) == want.get(l, 0)
                for l in range(1, lmax + 1)
            )
        else:
            checks["hom:interior_diagonal_vanishes"] = all(
                hom.interior_betti.get((l, l), 0) == 0
                for l in range(1, lmax + 1)
            )
        checks["hom:reciprocity"] = reciprocity_check(
            hom, hom.interior_betti, rank, n
        )
        if job.face_check:
            ok, _ = face_decomposition_check(
                arrangement, graph, lattice, hom, perms
            )
            checks["hom:face_decomposition"] = ok
        if fixture is not None:
            cap = min(lmax, fixture["lmax"])
            want = {
                k: v for k, v in _parse_cells(fixture["betti"]).items()
                if k[1] <= cap
            }
            got = {
                k: v for k, v in hom.betti.items() if v and k[1] <= cap
            }
            want_tor = {
                k: v for k, v in _parse_cells(fixture["torsion"]).items()
                if k[1] <= cap
            }
            got_tor = {
                k: list(v) for k, v in hom.torsion.items() if k[1] <= cap
            }
            bad = sorted(
                f"{k},{l}"
                for (k, l) in set(want) | set(got)
                if want.get((k, l)) != got.get((k, l))
            )
            checks["golden:betti"] = not bad and got_tor == {
                k: list(v) for k, v in want_tor.items()
            }
            golden["betti_cells_checked"] = len(want)
            if bad:
                golden["betti_diff"] = bad
    out = {"lmax": lmax, "checks": checks, "golden": golden,
           "ok": all(checks.values())}
    return out


def run(job):
    """Execute the job; returns (report bundle, list of failed checks)."""
    arrangement, name, is_file = load_arrangement(job.source)
    graph, lattice, cache_note = get_geometry(arrangement, job.cache_dir)
    if job.cache_dir:
        print(f"cache: {cache_note}", file=sys.stderr)
    _, _, perms = chamber_orbits(graph)
    bundle = {
        "schema": SCHEMA_VERSION,
        "source": job.source,
        "arrangement": {
            "name": name,
            "dimension": arrangement.dimension,
            "hyperplanes": arrangement.n,
            "labels": list(arrangement.labels),
            "rank": lattice.rank,
            "chambers": len(graph),
            "characteristic_polynomial": list(
                lattice.characteristic_polynomial()
            ),
        },
        "tasks": {},
    }
    failures = []
    mag_res = None

    def note_failures(task, out):
        for key, val in out.get("checks", {}).items():
            if not val:
                failures.append(f"{task}:{key}")

    for task in job.tasks:
        t0 = time.time()
        if task == "mag":
            out, mag_res = _mag_task(job, arrangement, graph, lattice, perms)
            note_failures(task, out)
        elif task == "homology":
            if mag_res is None:
                _, mag_res = _mag_task(job, arrangement, graph, lattice, perms)
            out, _ = _homology_task(job, arrangement, graph, lattice, perms,
                                    mag_res)
            note_failures(task, out)
        elif task == "lattice":
            out = _lattice_task(lattice)
        elif task == "conjectures":
            if mag_res is None:
                _, mag_res = _mag_task(job, arrangement, graph, lattice, perms)
            out = _conjectures_task(job, arrangement, graph, lattice, perms,
                                    mag_res)
        else:
            out = _verify_task(job, arrangement, name, is_file, graph,
                               lattice, perms)
            note_failures(task, out)
        bundle["tasks"][task] = out
        print(f"{task}: {time.time() - t0:.2f}s", file=sys.stderr)
    return bundle, failures


# ---------------------------------------------------------------------------
# rendering

def _poly_text(coeffs):
    if not any(coeffs):
        return "0"
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        size = abs(c)
        if i == 0:
            term = str(size)
        else:
            base = "q" if i == 1 else f"q^{i}"
            term = base if size == 1 else f"{size}{base}"
        if not parts:
            parts.append(f"-{term}" if c < 0 else term)
        else:
            parts.append(f"- {term}" if c < 0 else f"+ {term}")
    return " ".join(parts)


def _series_text(series):
    return ", ".join(str(c) for c in series)


def _betti_tsv(cells, lmax):
    table = _parse_cells(cells)
    if table:
        kmax = max(k for k, _ in table)
    else:
        kmax = 0
    lines = ["k\\l\t" + "\t".join(str(l) for l in range(lmax + 1))]
    for k in range(kmax + 1):
        row = [str(table.get((k, l), 0)) for l in range(lmax + 1)]
        lines.append(f"{k}\t" + "\t".join(row))
    return lines


def _checks_text(checks):
    bad = sorted(key for key, val in checks.items() if not val)
    if bad:
        return f"checks: {len(checks) - len(bad)}/{len(checks)} ok, failing: " \
            + ", ".join(bad)
    return f"checks: {len(checks)}/{len(checks)} ok"


def render(bundle):
    a = bundle["arrangement"]
    lines = [
        f"{a['name']}: dimension {a['dimension']}, {a['hyperplanes']} "
        f"hyperplanes, rank {a['rank']}, {a['chambers']} chambers"
    ]
    for task in TASKS:
        out = bundle["tasks"].get(task)
        if out is None:
            continue
        if task == "mag":
            lines.append(
                "magnitude = (%s) / (%s)"
                % (_poly_text(out["magnitude"]["num"]),
                   _poly_text(out["magnitude"]["den"]))
            )
            lines.append("series: " + _series_text(out["series"]))
            lines.append(
                "interior = (%s) / (%s)"
                % (_poly_text(out["interior"]["num"]),
                   _poly_text(out["interior"]["den"]))
            )
            factors = " ".join(
                f"Phi_{k}^{m}" if m > 1 else f"Phi_{k}"
                for k, m in out["cyclotomic_denominator"]
            )
            lines.append(f"denominator factors: {factors or '1'}")
            lines.append(
                f"chamber orbits: {out['orbit_count']}, symmetry order: "
                f"{out['symmetry_order']}"
            )
            lines.append(_checks_text(out["checks"]))
        elif task == "homology":
            lines.append(f"betti table to length {out['lmax']}:")
            lines.extend(_betti_tsv(out["betti"], out["lmax"]))
            if out["torsion"]:
                items = "; ".join(
                    f"({key}): {vals}" for key, vals in out["torsion"].items()
                )
                lines.append(f"torsion: {items}")
            else:
                lines.append("torsion: none")
            if out.get("four_cut_min") is not None:
                lines.append(f"shortest non-geodesic 3-chain: {out['four_cut_min']}")
            lines.append(_checks_text(out["checks"]))
        elif task == "lattice":
            lines.append(
                "characteristic polynomial coefficients (ascending): "
                + ", ".join(str(c) for c in out["characteristic_polynomial"])
            )
            by_rank = {}
            for f in out["flats"]:
                by_rank.setdefault(f["rank"], []).append(f)
            for r in sorted(by_rank):
                lines.append(f"rank {r}: {len(by_rank[r])} flats")
            lines.append(f"chambers: {out['chambers']}")
        elif task == "verify":
            for key in sorted(out["checks"]):
                status = "PASS" if out["checks"][key] else "FAIL"
                lines.append(f"{status} {key}")
            good = sum(1 for v in out["checks"].values() if v)
            lines.append(
                f"verify: {good}/{len(out['checks'])} checks passed "
                f"(lmax={out['lmax']})"
            )
        else:
            lines.append(json.dumps(out, indent=1, sort_keys=True))
    return lines


# ---------------------------------------------------------------------------
# entry point

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="magarr",
        description="Exact magnitude and magnitude homology of real "
        "central hyperplane arrangements.",
    )
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("source", help="catalog name or normals file")
    parser.add_argument("--lmax", type=int, default=None,
                        help="length cap for homology gradings")
    parser.add_argument("--det-check", action="store_true",
                        help="force the Varchenko determinant check")
    parser.add_argument("--json", metavar="PATH", default=None,
                        help="write the machine-readable bundle here")
    parser.add_argument("--cache", metavar="DIR", default=None,
                        help="lattice cache directory (or MAGARR_CACHE)")
    parser.add_argument("--no-face-check", action="store_true",
                        help="skip the face decomposition cross-checks")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        job = JobSpec(
            source=args.source,
            tasks=(args.task,),
            lmax=args.lmax,
            det_check=True if args.det_check else None,
            face_check=not args.no_face_check,
            json_path=args.json,
            cache_dir=args.cache or os.environ.get("MAGARR_CACHE"),
        )
        bundle, failures = run(job)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"error: {exc}; lower --lmax", file=sys.stderr)
        return 3
    except MagarrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in render(bundle):
        print(line)
    if job.json_path:
        with open(job.json_path, "w") as fh:
            json.dump(bundle, fh, sort_keys=True, indent=1)
            fh.write("\n")
    if failures:
        print("failed checks: " + ", ".join(sorted(failures)), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
