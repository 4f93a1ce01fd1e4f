"""Command line front end.

Usage::

    torickgk SUBCOMMAND -c config.json [--out PATH] [--format csv|json|pgm]
                        [--seed N] [--tol-scale X]

Every run reads a single JSON configuration (``"schema": 1``) which is
validated before any computation.  Exit codes: 0 success, 1 a check failed,
2 usage or configuration error, 3 numerical error.  The only environment
variable consulted is ``TORICKGK_OUTPUT_DIR``, which relative output paths
are resolved against.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .compactify import DEFAULT_SETTINGS, acgtf_check, check_c1_c2, check_c3
from .curvature import curvature_point, extremal_fit, u_gk_at
from .deform import DeformationFamily, admissible_range, u_gk_drift
from .errors import (
    ConfigError,
    ExprError,
    PolytopeError,
    TorickgkError,
    UnsupportedFormatForDim,
)
from .gk_core import GKStructure, frame_at
from .identities import SuiteSettings, run_identity_suite
from .oracle import almost_kahler_factor
from .polytope import InteriorGrid, build_polytope, sample_interior
from .potential import Expression, Guillemin, Quadratic, Sum, check_strict_convexity
from .report import ReportDoc, dumps

#: Environment variable overriding the directory of relative output paths.
OUTPUT_DIR_ENV = "TORICKGK_OUTPUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

_NUMBER = {"type": "number"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUMBER, "minItems": 1}, "minItems": 1}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1}

_POTENTIAL = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "guillemin"}, "scale": {"type": "number", "exclusiveMinimum": 0}}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "Q"],
         "properties": {"kind": {"const": "quadratic"}, "Q": _MATRIX, "l": _VECTOR, "c": _NUMBER}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "src"],
         "properties": {"kind": {"const": "expression"}, "src": {"type": "string", "minLength": 1}}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "terms"],
         "properties": {"kind": {"const": "sum"},
                        "terms": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/potential"}}}},
    ]
}

#: JSON schema of configuration documents.
CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "polytope"],
    "$defs": {"potential": _POTENTIAL},
    "properties": {
        "schema": {"const": 1},
        "description": {"type": "string"},
        "polytope": {
            "type": "object", "additionalProperties": False, "required": ["normals", "offsets"],
            "properties": {"normals": {"type": "array", "minItems": 2,
                                       "items": {"type": "array", "minItems": 1, "items": {"type": "integer"}}},
                           "offsets": _VECTOR},
        },
        "potential": {"$ref": "#/$defs/potential"},
        "C": _MATRIX,
        "grid": {
            "type": "object", "additionalProperties": False,
            "properties": {"resolution": {"type": "integer", "minimum": 1},
                           "epsilon": {"type": "number", "minimum": 0}},
        },
        "tolerances": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "extremal_threshold": {"type": "number", "exclusiveMinimum": 0},
                "convexity_pivot": {"type": "number", "exclusiveMinimum": 0},
                "rtol": {"type": "number", "exclusiveMinimum": 0},
                "atol": {"type": "number", "exclusiveMinimum": 0},
                "det_floor": {"type": "number", "exclusiveMinimum": 0},
                "slope_tol": {"type": "number", "exclusiveMinimum": 0},
                "zero_tol": {"type": "number", "exclusiveMinimum": 0},
                "c3_margin": {"type": "number", "exclusiveMinimum": 0},
                "c3_rtol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "samples": {
            "type": "object", "additionalProperties": False,
            "properties": {"points": {"type": "integer", "minimum": 1},
                           "oracle_points": {"type": "integer", "minimum": 1},
                           "first_order_points": {"type": "integer", "minimum": 1}},
        },
        "compactify": {
            "type": "object", "additionalProperties": False,
            "properties": {"reference": {
                "type": "object", "additionalProperties": False,
                "properties": {"potential": {"$ref": "#/$defs/potential"}, "C": _MATRIX}}},
        },
        "deform": {
            "type": "object", "additionalProperties": False,
            "properties": {"t_list": {"type": "array", "items": _NUMBER, "minItems": 1},
                           "search_limit": {"type": "number", "exclusiveMinimum": 0}},
        },
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {"format": {"enum": ["csv", "json", "pgm"]}, "path": {"type": "string"},
                           "field": {"type": "string"}},
        },
        "seed": {"type": "integer", "minimum": 0},
    },
}


# ------------------------------------------------------------------ config


@dataclass
class RunConfig:
    """A validated configuration with its numerical objects built."""

    raw: dict
    structure: GKStructure
    grid_resolution: int
    grid_epsilon: float
    seed: int
    tol_scale: float
    out_format: str | None
    out_path: str | None
    field: str

    @property
    def polytope(self):
        return self.structure.polytope

    def grid(self) -> InteriorGrid:
        return sample_interior(self.polytope, self.grid_resolution, self.grid_epsilon)


def validate_config(doc) -> None:
    """Raise :class:`ConfigError` naming the offending path if ``doc`` violates the schema."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config error at {path}: {err.message}")


def build_potential(spec: dict, P, where: str = "potential"):
    """Potential object from its configuration entry."""
    kind = spec["kind"]
    m = P.dim
    try:
        if kind == "guillemin":
            return Guillemin(P, float(spec.get("scale", 1.0)))
        if kind == "quadratic":
            Q = np.asarray(spec["Q"], dtype=float)
            l = np.asarray(spec.get("l", np.zeros(m)), dtype=float)
            if Q.shape != (m, m) or l.shape != (m,):
                raise ConfigError(f"config error at {where}: Q must be {m}x{m} and l of length {m}")
            return Quadratic(Q, l, float(spec.get("c", 0.0)))
        if kind == "expression":
            return Expression.from_source(spec["src"], m)
        return Sum(tuple(build_potential(t, P, f"{where}/terms/{i}") for i, t in enumerate(spec["terms"])))
    except ExprError as err:
        raise ConfigError(f"config error at {where}/src: {err}") from err
    except ValueError as err:
        raise ConfigError(f"config error at {where}: {err}") from err


def build_C(rows, m: int, where: str = "C") -> np.ndarray:
    if rows is None:
        return np.zeros((m, m))
    C = np.asarray(rows, dtype=float)
    if C.shape != (m, m):
        raise ConfigError(f"config error at {where}: expected a {m}x{m} matrix, got shape {C.shape}")
    if not np.array_equal(C, -C.T):
        raise ConfigError(f"config error at {where}: the matrix is not antisymmetric")
    return C


def load_config(path, seed=None, tol_scale=None, out_format=None, out_path=None) -> RunConfig:
    """Read, validate and build a configuration; command line values take precedence."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err.strerror}") from err
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    return config_from_dict(doc, seed, tol_scale, out_format, out_path)


def config_from_dict(doc, seed=None, tol_scale=None, out_format=None, out_path=None) -> RunConfig:
    validate_config(doc)
    poly = doc["polytope"]
    normals = poly["normals"]
    if len({len(r) for r in normals}) != 1 or len(poly["offsets"]) != len(normals):
        raise ConfigError("config error at polytope: normals must have equal length and match the offsets")
    try:
        P = build_polytope(normals, poly["offsets"])
    except PolytopeError as err:
        raise ConfigError(f"config error at polytope: {err}") from err
    pot = build_potential(doc.get("potential", {"kind": "guillemin"}), P)
    C = build_C(doc.get("C"), P.dim)
    grid = doc.get("grid", {})
    out = doc.get("output", {})
    tols = doc.get("tolerances", {})
    scale = tol_scale if tol_scale is not None else tols.get("scale", 1.0)
    if not scale > 0:
        raise ConfigError("--tol-scale must be positive")
    return RunConfig(doc, GKStructure(P, pot, C), int(grid.get("resolution", 10)),
                     float(grid.get("epsilon", 1e-3)),
                     int(seed if seed is not None else doc.get("seed", 42)), float(scale),
                     out_format or out.get("format"), out_path or out.get("path"), out.get("field", "u_gk"))


def _probe_settings(cfg: RunConfig):
    tols = cfg.raw.get("tolerances", {})
    keys = ("rtol", "atol", "det_floor", "slope_tol", "zero_tol", "c3_margin", "c3_rtol")
    return replace(DEFAULT_SETTINGS, tol_scale=cfg.tol_scale, **{k: tols[k] for k in keys if k in tols})


# ------------------------------------------------------------------ fields


@dataclass(frozen=True)
class ScalarField:
    """Values of a scalar function at the points of an interior grid."""

    grid: InteriorGrid
    values: np.ndarray
    name: str = "value"


def field_to_csv(field: ScalarField) -> str:
    """CSV with header ``mu1,..,mum,value`` and 17 significant digits, in grid order."""
    m = field.grid.points.shape[1]
    lines = [",".join([f"mu{i + 1}" for i in range(m)] + ["value"])]
    for x, v in zip(field.grid.points, field.values):
        lines.append(",".join(f"{a:.17g}" for a in (*x, v)))
    return "\n".join(lines) + "\n"


def read_field_csv(text: str):
    """Inverse of :func:`field_to_csv`: returns ``(points, values)``."""
    rows = list(csv.reader(io.StringIO(text)))
    data = np.array([[float(a) for a in r] for r in rows[1:]], dtype=float)
    return data[:, :-1], data[:, -1]


def field_to_json(field: ScalarField) -> str:
    g = field.grid
    return dumps({"grid": {"resolution": g.resolution, "epsilon": g.eps, "lower": g.lower, "upper": g.upper,
                           "points": g.points},
                  "name": field.name, "values": field.values})


#: Relative spread below which a field is rendered as constant.
PGM_FLAT_RTOL = 1e-12


def field_to_pgm(field: ScalarField) -> bytes:
    """Binary PGM (P5) with one pixel per grid cell; rows run from high ``mu2`` to low.

    Values are mapped linearly from ``[min, max]`` to ``[0, 255]``.  A field
    whose spread is within :data:`PGM_FLAT_RTOL` of its magnitude counts as
    constant and maps to 0, so rounding noise in a constant quantity is not
    stretched over the whole grey range.  Cells dropped by the grid margin
    are 0 as well.
    """
    g = field.grid
    if g.points.shape[1] != 2:
        raise UnsupportedFormatForDim(f"PGM output needs a two dimensional grid, got dimension {g.points.shape[1]}")
    v = np.asarray(field.values, dtype=float)
    lo, hi = float(np.min(v)), float(np.max(v))
    flat = hi - lo <= PGM_FLAT_RTOL * max(abs(lo), abs(hi))
    scaled = np.zeros_like(v) if flat else np.rint((v - lo) / (hi - lo) * 255.0)
    n = g.resolution
    img = np.zeros((n, n), dtype=np.uint8)
    for (i, j), s in zip(g.index, scaled):
        img[n - 1 - j, i] = int(s)
    return f"P5\n{n} {n}\n255\n".encode("ascii") + img.tobytes()


def emit_field(field: ScalarField, fmt: str):
    """Serialise a field; ``bytes`` for PGM, ``str`` otherwise."""
    if fmt == "csv":
        return field_to_csv(field)
    if fmt == "json":
        return field_to_json(field)
    if fmt == "pgm":
        return field_to_pgm(field)
    raise ConfigError(f"unknown format {fmt!r}")


def resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _write(payload, path: Path | None, stdout):
    if path is None:
        if isinstance(payload, bytes):
            buf = getattr(stdout, "buffer", None)
            if buf is None:
                raise ConfigError("binary output needs --out or a binary standard output")
            buf.write(payload)
            buf.flush()
        else:
            stdout.write(payload)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, bytes):
        path.write_bytes(payload)
    else:
        path.write_text(payload)


# ------------------------------------------------------------------ commands


def _curvature_table(cfg: RunConfig):
    grid = cfg.grid()
    G = cfg.structure
    cols = {"u_gk": []}
    dim4 = G.dim == 2
    if dim4:
        for k in ("p", "u_j", "s_g", "lee2", "lap_p"):
            cols[k] = []
    for x in grid.points:
        if dim4:
            cp = curvature_point(G, x)
            cols["u_gk"].append(cp.u_gk)
            cols["p"].append(cp.scalars.p)
            cols["u_j"].append(cp.u_J)
            cols["s_g"].append(cp.s_g)
            cols["lee2"].append(cp.scalars.lee_norm2)
            cols["lap_p"].append(cp.scalars.lap_p)
        else:
            cols["u_gk"].append(u_gk_at(G, x))
    return grid, {k: np.array(v) for k, v in cols.items()}


def cmd_curvature(cfg: RunConfig, fmt: str):
    grid, cols = _curvature_table(cfg)
    if fmt == "csv":
        m = grid.points.shape[1]
        lines = [",".join([f"mu{i + 1}" for i in range(m)] + list(cols))]
        for r, x in enumerate(grid.points):
            lines.append(",".join(f"{a:.17g}" for a in (*x, *(cols[k][r] for k in cols))))
        return "\n".join(lines) + "\n", EXIT_OK
    if cfg.field not in cols:
        raise ConfigError(f"config error at output/field: {cfg.field!r} is not one of {sorted(cols)}")
    if fmt == "json":
        return dumps({"grid": {"resolution": grid.resolution, "epsilon": grid.eps, "lower": grid.lower,
                               "upper": grid.upper, "points": grid.points},
                      "values": cols}), EXIT_OK
    return emit_field(ScalarField(grid, cols[cfg.field], cfg.field), fmt), EXIT_OK


def cmd_check_polytope(cfg: RunConfig, fmt: str):
    P = cfg.polytope
    rep = ReportDoc("check_polytope", True)
    rep.add_condition("delzant", True, {"dimension": P.dim, "facets": P.n_facets,
                                        "vertices": P.vertices, "vertex_facets": [list(v) for v in P.vertex_facets]})
    rep.notes.append("facet indices are 0-based in the order of the configuration")
    if "potential" in cfg.raw:
        pivot = cfg.raw.get("tolerances", {}).get("convexity_pivot", 1e-10) * cfg.tol_scale
        conv = check_strict_convexity(cfg.structure.potential, cfg.grid(), P, rel_pivot=pivot)
        rep.add_condition("potential_strictly_convex", conv.verdict, conv.conditions["positive_definite_hessian"])
        rep.witnesses.extend(conv.witnesses)
    return _report_out(rep, fmt)


def cmd_identities(cfg: RunConfig, fmt: str):
    samples = cfg.raw.get("samples", {})
    st = SuiteSettings(points=samples.get("points", 200), oracle_points=samples.get("oracle_points", 200),
                       first_order_points=samples.get("first_order_points", 10), tol_scale=cfg.tol_scale)
    rep = run_identity_suite(cfg.structure, cfg.seed, st)
    rep.notes.append(f"seed {cfg.seed}")
    return _report_out(rep, fmt)


def _reference(cfg: RunConfig, against: str | None) -> GKStructure:
    P = cfg.polytope
    ref_spec = cfg.raw.get("compactify", {}).get("reference")
    if against == "guillemin" or ref_spec is None:
        return GKStructure.kahler(P, Guillemin(P))
    pot = build_potential(ref_spec.get("potential", {"kind": "guillemin"}), P, "compactify/reference/potential")
    return GKStructure(P, pot, build_C(ref_spec.get("C"), P.dim, "compactify/reference/C"))


def cmd_compactify(cfg: RunConfig, fmt: str, against: str | None):
    st = _probe_settings(cfg)
    ref = _reference(cfg, against)
    test = cfg.structure
    c12 = check_c1_c2(ref, test, st)
    rep = ReportDoc("compactify", c12.verdict)
    rep.tolerances.update(st.tolerances())
    rep.conditions.update(c12.conditions)
    rep.witnesses.extend(c12.witnesses)
    rep.notes.extend(c12.notes)
    if c12.verdict:
        c3 = check_c3(ref, test, c12, st)
        rep.add_condition("C3", c3.passed("C3"), c3.conditions["C3"])
        rep.witnesses.extend(c3.witnesses)
        rep.notes.extend(c3.notes)
    else:
        rep.notes.append("C3 not evaluated: it presupposes C1 and C2")
    if test.dim == 2:
        ac = acgtf_check(test, almost_kahler_factor, settings=st)
        rep.notes.append("acgtf audit of the omega-compatible metric g_f with f = sqrt((1 - p)/2): "
                         + ac.to_dict()["verdict"])
    return _report_out(rep, fmt)


def cmd_deform(cfg: RunConfig, fmt: str, t_list):
    G = cfg.structure
    if not np.any(G.C):
        raise ConfigError("config error at C: the deformation direction is zero")
    dcfg = cfg.raw.get("deform", {})
    ts = t_list if t_list is not None else dcfg.get("t_list", [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0])
    fam = DeformationFamily(G.with_C(np.zeros_like(G.C)), G.C)
    st = _probe_settings(cfg)
    rng_range = admissible_range(fam, float(dcfg.get("search_limit", 1e6)), settings=st)
    pts = cfg.grid().points
    rows = []
    all_ok = True
    for t in ts:
        drift = u_gk_drift(fam, pts, [t])
        base = max(abs(u_gk_at(fam.base, x)) for x in pts)
        Gt = fam.at(t)
        if G.dim == 2:
            ps = [frame_at(Gt, x).p for x in pts]
            pmin, pmax = min(ps), max(ps)
        else:
            pmin = pmax = float("nan")
        lo_ok = rng_range.t_min is None or t > rng_range.t_min
        hi_ok = rng_range.t_max is None or t < rng_range.t_max
        admissible = lo_ok and hi_ok
        drift_ok = drift <= 1e-10 * cfg.tol_scale * (1.0 + base)
        all_ok = all_ok and drift_ok
        rows.append((t, drift, pmin, pmax, admissible))
    if fmt == "json":
        doc = {"rows": [{"t": r[0], "max_u_gk_drift": r[1], "p_min": r[2], "p_max": r[3],
                         "admissible": r[4]} for r in rows],
               "t_min": rng_range.t_min, "t_max": rng_range.t_max,
               "search_limit": rng_range.search_limit, "notes": rng_range.notes}
        return dumps(doc), EXIT_OK if all_ok else EXIT_FAIL
    if fmt != "csv":
        raise UnsupportedFormatForDim("deform writes csv or json")
    lines = ["t,max_u_gk_drift,p_min,p_max,admissible"]
    for t, d, a, b, ok in rows:
        lines.append(f"{t:.17g},{d:.17g},{a:.17g},{b:.17g},{'pass' if ok else 'fail'}")
    return "\n".join(lines) + "\n", EXIT_OK if all_ok else EXIT_FAIL


def cmd_extremal(cfg: RunConfig, fmt: str):
    thr = cfg.raw.get("tolerances", {}).get("extremal_threshold")
    if thr is not None:
        thr = thr * cfg.tol_scale
    fit = extremal_fit(cfg.structure, cfg.grid(), thr)
    doc = {"coeffs": fit.coeffs, "residual": fit.residual, "is_extremal": fit.is_extremal,
           "threshold": fit.threshold, "n_points": fit.n_points}
    if fmt != "json":
        raise UnsupportedFormatForDim("extremal writes json")
    return dumps(doc), EXIT_OK if fit.is_extremal else EXIT_FAIL


def _report_out(rep: ReportDoc, fmt: str):
    if fmt != "json":
        raise UnsupportedFormatForDim(f"reports are written as json, not {fmt}")
    return rep.to_json(), EXIT_OK if rep.verdict else EXIT_FAIL


# ------------------------------------------------------------------ driver


_DEFAULT_FORMAT = {"check-polytope": "json", "curvature": "csv", "identities": "json",
                   "compactify": "json", "deform": "csv", "extremal": "json"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", required=True, help="JSON configuration file")
    common.add_argument("--out", help="output file (standard output when omitted)")
    common.add_argument("--format", choices=["csv", "json", "pgm"], help="output format")
    common.add_argument("--seed", type=int, help="seed for random sample points (default: config, else 42)")
    common.add_argument("--tol-scale", type=float, help="multiply every tolerance by this factor")
    p = _Parser(prog="torickgk", description="Toric generalized Kähler structures from polytope data")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check-polytope", parents=[common], help="validate the polytope and the potential's convexity")
    sub.add_parser("curvature", parents=[common], help="curvature table on the interior grid")
    sub.add_parser("identities", parents=[common], help="run the identity suite")
    cp = sub.add_parser("compactify", parents=[common], help="boundary extension checks")
    cp.add_argument("--against", choices=["guillemin"], help="compare with the canonical Kähler structure")
    dp = sub.add_parser("deform", parents=[common], help="the family Psi(t) = S + t C")
    dp.add_argument("--t-list", help="comma separated parameters t")
    sub.add_parser("extremal", parents=[common], help="affine fit of u_GK on the grid")
    return p


def _parse_t_list(text):
    if text is None:
        return None
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as err:
        raise ConfigError(f"--t-list: {err}") from err


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run the command line and return the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, args.seed, args.tol_scale, args.format, args.out)
        fmt = cfg.out_format or _DEFAULT_FORMAT[args.command]
        if fmt == "pgm" and cfg.polytope.dim != 2:
            raise UnsupportedFormatForDim(f"PGM output needs a two dimensional polytope, not {cfg.polytope.dim}")
        if args.command == "check-polytope":
            payload, code = cmd_check_polytope(cfg, fmt)
        elif args.command == "curvature":
            payload, code = cmd_curvature(cfg, fmt)
        elif args.command == "identities":
            payload, code = cmd_identities(cfg, fmt)
        elif args.command == "compactify":
            payload, code = cmd_compactify(cfg, fmt, args.against)
        elif args.command == "deform":
            payload, code = cmd_deform(cfg, fmt, _parse_t_list(args.t_list))
        else:
            payload, code = cmd_extremal(cfg, fmt)
        _write(payload, resolve_output(cfg.out_path), stdout)
        return code
    except (ConfigError, UnsupportedFormatForDim) as err:
        print(f"torickgk: {err}", file=stderr)
        return EXIT_USAGE
    except TorickgkError as err:
        print(f"torickgk: numerical error: {type(err).__name__}: {err}", file=stderr)
        return EXIT_NUMERICAL
    except (FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"torickgk: numerical error: {err}", file=stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())
