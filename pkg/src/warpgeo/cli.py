"""Command-line entry point.

Subcommands wire JSON configs to the verification and solving pipelines:

    warpgeo verify-compat --config cfg.json [--out DIR]
    warpgeo verify-lemmas --config cfg.json
    warpgeo solve-cap     --config cfg.json
    warpgeo sweep         --config cfg.json

Reports are canonical JSON (sorted keys, no timestamps), profiles and sweep
tables are CSV, and each report is rendered to a PNG figure next to the
delimited output unless --no-plots is given.  Exit codes: 0 success,
1 residual/verdict failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np
from jsonschema import Draft202012Validator

from . import conformal, figures
from .ambient import AmbientSpace, WarpFn
from .compat import compat_report
from .errors import NoBoundaryReached, WarpGeoError
from .fundforms import complexify, fundamental_data, height_identity_residuals
from .graphsolve import (CapProblem, height_verdict, minimal_rigidity_check,
                         shoot_cap, solve_apex_for_boundary)
from .immersion import (Slice, cylinder, euclid_sphere, jet_at, poly_graph,
                        rot_graph_from_samples)
from .report import ResidualSet, dump_csv, dump_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# ---------------------------------------------------------------------------
# config schema (version 1); unknown keys are rejected everywhere
# ---------------------------------------------------------------------------

_WARP_SCHEMA = {
    "type": "object",
    "properties": {
        "family": {"enum": ["Const", "Affine", "ExpScaled", "Quadratic"]},
        "a": {"type": "number"}, "b": {"type": "number"},
        "c": {"type": "number"},
    },
    "required": ["family"],
    "additionalProperties": False,
}

_AMBIENT_SCHEMA = {
    "type": "object",
    "properties": {"kappa": {"enum": [-1, 0, 1]}, "warp": _WARP_SCHEMA},
    "required": ["kappa", "warp"],
    "additionalProperties": False,
}

_SURFACE_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["slice", "sphere", "cylinder", "rot-graph",
                          "profile-csv"]},
        "t0": {"type": "number"},
        "extent": {"type": "number", "exclusiveMinimum": 0},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "height": {"type": "number", "exclusiveMinimum": 0},
        "polar_margin": {"type": "number", "exclusiveMinimum": 0},
        "coeffs": {"type": "array", "items": {"type": "number"},
                   "minItems": 1},
        "r_range": {"type": "array", "items": {"type": "number"},
                    "minItems": 2, "maxItems": 2},
        "path": {"type": "string"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_JETS_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": ["exact", "fd"]},
        "step": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

_TOL_SCHEMA = {
    "type": "object",
    "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
}

_GRID_SCHEMA = {
    "type": "object",
    "properties": {
        "n_u": {"type": "integer", "minimum": 1},
        "n_v": {"type": "integer", "minimum": 1},
        "n_s": {"type": "integer", "minimum": 1},
        "n_theta": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

_CHART_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["auto", "isothermal-i", "conformal-ii"]},
        "sigma_range": {"type": "array", "items": {"type": "number"},
                        "minItems": 2, "maxItems": 2},
        "fd_step": {"type": "number", "exclusiveMinimum": 0},
        "richardson": {"type": "boolean"},
        "orientation": {"enum": ["frame", "up", "down"]},
        "n_tab": {"type": "integer", "minimum": 16},
    },
    "additionalProperties": False,
}

_SOLVE_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": ["cmc", "ke", "minimal"]},
        "target": {"type": "number"},
        "apex": {"type": "number", "exclusiveMinimum": 0},
        "apex_heights": {"type": "array", "items": {"type": "number"}},
        "boundary": {"type": "number", "exclusiveMinimum": 0},
        "r_max": {"type": "number", "exclusiveMinimum": 0},
        "rtol": {"type": "number", "exclusiveMinimum": 0},
        "atol": {"type": "number", "exclusiveMinimum": 0},
        "method": {"enum": ["RK45", "DOP853"]},
        "profile_points": {"type": "integer", "minimum": 16},
    },
    "required": ["mode"],
    "additionalProperties": False,
}

_SWEEP_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": ["cmc", "ke"]},
        "targets": {"type": "array", "items": {"type": "number"}},
        "apex_heights": {"type": "array", "items": {"type": "number"}},
        "apex_count": {"type": "integer", "minimum": 1},
        "r_max": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["mode", "targets"],
    "additionalProperties": False,
}

_OUTPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "report": {"type": "string"},
        "profile": {"type": "string"},
        "table": {"type": "string"},
        "figure": {"type": "string"},
    },
    "additionalProperties": False,
}


def _command_schema(command: str) -> dict:
    props = {
        "schema": {"const": "1"},
        "ambient": _AMBIENT_SCHEMA,
        "tolerances": _TOL_SCHEMA,
        "output": _OUTPUT_SCHEMA,
    }
    required = ["schema", "ambient"]
    if command == "verify-compat":
        props.update(surface=_SURFACE_SCHEMA, grid=_GRID_SCHEMA,
                     jets=_JETS_SCHEMA)
        required.append("surface")
    elif command == "verify-lemmas":
        props.update(surface=_SURFACE_SCHEMA, grid=_GRID_SCHEMA,
                     chart=_CHART_SCHEMA,
                     scaling={"type": "object",
                              "properties": {
                                  "fields": {"type": "integer",
                                             "minimum": 1},
                                  "scales": {"type": "array",
                                             "items": {"type": "number"}}},
                              "additionalProperties": False})
        required.append("surface")
    elif command == "solve-cap":
        props.update(solve=_SOLVE_SCHEMA)
        required.append("solve")
    elif command == "sweep":
        props.update(sweep=_SWEEP_SCHEMA)
        required.append("sweep")
    return {"type": "object", "properties": props, "required": required,
            "additionalProperties": False}


class ConfigError(Exception):
    pass


def load_config(path: str, command: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}")
    validator = Draft202012Validator(_command_schema(command))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.path))
    if errors:
        where = "/".join(str(p) for p in errors[0].path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {errors[0].message}")
    return cfg


def build_space(cfg: dict) -> AmbientSpace:
    amb = cfg["ambient"]
    return AmbientSpace(amb["kappa"], WarpFn.from_json(amb["warp"]))


def build_surface(cfg: dict, jets_cfg=None):
    """Surface instance plus a flag for closed-form (catalog) jets."""
    sc = dict(cfg["surface"])
    kind = sc.pop("kind")
    if kind == "slice":
        surf = Slice(sc.get("t0", 0.0), extent=sc.get("extent", 5.0))
    elif kind == "sphere":
        surf = euclid_sphere(sc.get("radius", 1.0), sc.get("t0", 0.0),
                             polar_margin=sc.get("polar_margin", 0.2))
    elif kind == "cylinder":
        surf = cylinder(sc.get("radius", 1.0), height=sc.get("height", 5.0))
    elif kind == "rot-graph":
        if "coeffs" not in sc or "r_range" not in sc:
            raise ConfigError("rot-graph needs coeffs and r_range")
        surf = poly_graph(sc["coeffs"], sc["r_range"])
    elif kind == "profile-csv":
        if "path" not in sc:
            raise ConfigError("profile-csv needs a path")
        r, u = read_profile_csv(sc["path"])
        surf = rot_graph_from_samples(r, u)
    else:  # pragma: no cover - schema rules this out
        raise ConfigError(f"unknown surface kind {kind}")
    if jets_cfg and jets_cfg.get("mode", "exact") == "fd":
        surf.jet_mode = ("fd", jets_cfg.get("step", 1e-4))
    return surf, kind != "profile-csv"


def read_profile_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read profile CSV: {exc}")
    if len(rows) < 5:
        raise ConfigError("profile CSV too short")
    body = rows[1:]  # one-line header
    try:
        r = np.array([float(row[0]) for row in body])
        u = np.array([float(row[1]) for row in body])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad profile CSV row: {exc}")
    return r, u


def _scaled(tolerances: dict, scale: float) -> dict:
    return {k: v * scale for k, v in tolerances.items()}


def _stat_maxima(rs: ResidualSet) -> dict:
    return {eq: st.max for eq, st in rs.stats.items()}


def _out_path(args, name: str) -> str:
    import os
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify_compat(cfg, args) -> int:
    space = build_space(cfg)
    surf, is_catalog = build_surface(cfg, cfg.get("jets"))
    grid = cfg.get("grid", {})
    rep = compat_report(space, surf, n_u=grid.get("n_u", 3),
                        n_v=grid.get("n_v", 3))

    base = 1e-6 if surf.jet_mode == "exact" else 1e-4
    tol = {eq: base for eq in ("gauss", "codazzi", "eq35", "eq33", "eq34")}
    tol.update(cfg.get("tolerances", {}))
    tol = _scaled(tol, args.tol_scale)

    maxima = _stat_maxima(rep.residuals)
    passed = all(maxima[eq] <= tol[eq] for eq in maxima)
    out = {
        "command": "verify-compat",
        "config": cfg,
        "report": rep.to_json(),
        "tolerances": tol,
        "pass": passed,
    }
    report_path = _out_path(args, cfg.get("output", {}).get(
        "report", "compat_report.json"))
    dump_json(out, report_path)
    if not args.no_plots:
        figures.residual_bars(
            maxima, tol,
            _out_path(args, cfg.get("output", {}).get(
                "figure", "compat_residuals.png")),
            "compatibility residuals")
    print(f"verify-compat: {'PASS' if passed else 'FAIL'} "
          f"({report_path})")
    return EXIT_OK if passed else EXIT_FAIL


def _lemma_grid(chart, grid_cfg, h, richardson):
    return conformal.chart_grid(chart, grid_cfg.get("n_s", 6),
                                grid_cfg.get("n_theta", 2),
                                h=h, richardson=richardson)


def cmd_verify_lemmas(cfg, args) -> int:
    space = build_space(cfg)
    surf, is_catalog = build_surface(cfg)
    chart_cfg = cfg.get("chart", {})
    kind = chart_cfg.get("kind", "auto")
    sigma_range = chart_cfg.get("sigma_range")
    if sigma_range is None and not is_catalog:
        # sampled profiles: stay clear of the axis, where the chart
        # coordinate stretches logarithmically, and of the steep collar
        # near the boundary, where interpolated second derivatives are
        # noisiest
        lo, hi = surf.param_domain[0]
        sigma_range = (max(lo, 0.08 * hi), 0.9 * hi)
    if kind == "auto":
        lo, hi = sigma_range or surf.param_domain[0]
        kes = [fundamental_data(space, surf.exact_jet(sg, 0.0),
                                "frame").ext_curv
               for sg in np.linspace(lo, hi, 9)]
        kind = (conformal.CONFORMAL_II if min(kes) > 1e-10
                else conformal.ISOTHERMAL_I)

    chart = conformal.build_chart(
        space, surf, kind, sigma_range=sigma_range,
        n_tab=chart_cfg.get("n_tab", 1200),
        orientation=chart_cfg.get("orientation", "frame"))
    h = chart_cfg.get("fd_step", 1e-3 if is_catalog else 1e-2)
    richardson = chart_cfg.get("richardson", True)
    pts = _lemma_grid(chart, cfg.get("grid", {}), h, richardson)

    # pointwise linear-algebra identities hold in any chart
    identities = ResidualSet()
    curvatures = []
    for (s, th) in pts:
        fd = fundamental_data(space, jet_at(chart.surface, s, th),
                              chart.orientation)
        height_identity_residuals(fd, complexify(fd), out=identities)
        curvatures.append((fd.mean_curv, fd.ext_curv))

    if kind == conformal.CONFORMAL_II:
        chart_res = conformal.second_form_chart_residuals(
            space, chart, pts, h=h, richardson=richardson)
    else:
        chart_res = conformal.isothermal_chart_residuals(
            space, chart, pts, h=h, richardson=richardson)

    flux = {}
    if space.kappa == 0:
        hs = [c[0] for c in curvatures]
        kes = [c[1] for c in curvatures]
        # sampled profiles carry interpolation error in the curvature trace
        const_tol = 1e-6 if is_catalog else 1e-4
        try:
            if kind == conformal.CONFORMAL_II:
                ke0 = conformal.check_constant(kes, const_tol, what="K_e")
                diffs = [abs(np.subtract(*conformal.aux_laplacian_ke(
                    space, chart, s, th, ke0, h=h, richardson=richardson)))
                    for (s, th) in pts]
                flux["eq16g"] = {"maxDiff": float(max(diffs)),
                                 "constant": ke0}
            elif abs(np.mean(hs)) <= 1e-8:
                diffs = [abs(np.subtract(*conformal.minimal_graph_identity(
                    space, chart, s, th, h=h, richardson=richardson)))
                    for (s, th) in pts]
                flux["minimalLaplacian"] = {"maxDiff": float(max(diffs))}
            else:
                h0 = conformal.check_constant(hs, const_tol, what="H")
                if h0 > 0:
                    diffs = [abs(np.subtract(*conformal.aux_laplacian_h(
                        space, chart, s, th, h0, h=h,
                        richardson=richardson))) for (s, th) in pts]
                    flux["eqle2"] = {"maxDiff": float(max(diffs)),
                                     "constant": h0}
        except conformal.NotConstantCurvature:
            pass  # variable-curvature surface: no flux-function identity

    scaling = None
    if "scaling" in cfg:
        scaling = _run_scaling(cfg["scaling"], args.seed)

    chart_tol = 1e-5 if is_catalog else 1e-3
    tol = {eq: 1e-8 for eq in identities.stats}
    tol.update({eq: chart_tol for eq in chart_res.stats})
    tol["he5"] = 1e-8  # pointwise algebraic identity, no differencing
    tol.update(cfg.get("tolerances", {}))
    tol = _scaled(tol, args.tol_scale)

    maxima = {**_stat_maxima(identities), **_stat_maxima(chart_res)}
    passed = all(maxima[eq] <= tol[eq] for eq in maxima)
    for rec in flux.values():
        passed = passed and rec["maxDiff"] <= chart_tol * args.tol_scale
    if scaling is not None:
        passed = passed and scaling["maxDiff"] <= 1e-6 * args.tol_scale

    out = {
        "command": "verify-lemmas",
        "config": cfg,
        "chart": {"kind": kind, "sRange": list(chart.s_range),
                  "fdStep": h, "richardson": richardson,
                  "frameSign": chart.frame_sign},
        "identities": identities.to_json(),
        "chartResiduals": chart_res.to_json(),
        "flux": flux,
        "tolerances": tol,
        "pass": passed,
    }
    if scaling is not None:
        out["scaling"] = scaling
    report_path = _out_path(args, cfg.get("output", {}).get(
        "report", "lemma_report.json"))
    dump_json(out, report_path)
    if not args.no_plots:
        figures.residual_bars(
            maxima, tol,
            _out_path(args, cfg.get("output", {}).get(
                "figure", "lemma_residuals.png")),
            f"chart identity residuals ({kind})")
    print(f"verify-lemmas[{kind}]: {'PASS' if passed else 'FAIL'} "
          f"({report_path})")
    return EXIT_OK if passed else EXIT_FAIL


def _run_scaling(scfg: dict, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    n_fields = scfg.get("fields", 20)
    scales = scfg.get("scales", [0.1, 2.5, 10.0])
    for _ in range(n_fields):
        a, b, c, d = rng.uniform(-1.0, 1.0, size=4)

        def metric(s, t):
            m = np.array([[2.0 + np.sin(a * s + b * t), 0.3 * np.cos(c * t)],
                          [0.3 * np.cos(c * t), 1.5 + 0.5 * np.cos(d * s)]])
            return m

        def u(s, t):
            return np.sin(a * s + 2 * t) + np.cos(b * s * t) + 0.5 * s * s

        pt = rng.uniform(-1.0, 1.0, size=2)
        for cc in scales:
            lhs, rhs = conformal.laplacian_scaling(
                metric, u, cc, pt[0], pt[1])
            worst = max(worst, abs(lhs - rhs))
    return {"maxDiff": worst, "fields": n_fields, "scales": list(scales)}


def cmd_solve_cap(cfg, args) -> int:
    space = build_space(cfg)
    sv = cfg["solve"]
    outputs = cfg.get("output", {})

    if sv["mode"] == "minimal":
        heights = sv.get("apex_heights", [sv.get("apex", 0.5)])
        rep = minimal_rigidity_check(space, heights,
                                     r_max=sv.get("r_max", 10.0))
        out = {"command": "solve-cap", "config": cfg,
               "rigidity": rep.to_json(), "pass": rep.consistent}
        path = _out_path(args, outputs.get("report", "rigidity_report.json"))
        dump_json(out, path)
        print(f"solve-cap[minimal]: "
              f"{'PASS' if rep.consistent else 'FAIL'} ({path})")
        return EXIT_OK if rep.consistent else EXIT_FAIL

    problem = CapProblem(
        mode=sv["mode"], space=space, target=sv.get("target", 0.0),
        apex_height=sv.get("apex"), target_boundary=sv.get("boundary"),
        r_max=sv.get("r_max", 10.0), rtol=sv.get("rtol", 1e-10),
        atol=sv.get("atol", 1e-12), method=sv.get("method", "RK45"),
        profile_points=sv.get("profile_points", 801))
    try:
        if problem.apex_height is None:
            solve_apex_for_boundary(problem)
        cap = shoot_cap(problem)
    except NoBoundaryReached as exc:
        out = {"command": "solve-cap", "config": cfg,
               "outcome": "no-boundary", "detail": str(exc), "pass": False}
        path = _out_path(args, outputs.get("report", "cap_verdict.json"))
        dump_json(out, path)
        print(f"solve-cap: NO-BOUNDARY ({path})")
        return EXIT_FAIL

    verdict = height_verdict(cap, problem)
    csv_path = _out_path(args, outputs.get("profile", "cap_profile.csv"))
    dump_csv(csv_path, ("r", "u", "uPrime", "curvature"), cap.csv_rows())
    out = {"command": "solve-cap", "config": cfg,
           "outcome": "cap",
           "boundaryRadius": cap.boundary_radius,
           "apexHeight": problem.apex_height,
           "verdict": verdict.to_json(),
           "pass": verdict.passes}
    path = _out_path(args, outputs.get("report", "cap_verdict.json"))
    dump_json(out, path)
    if not args.no_plots:
        figures.cap_profile(
            cap.r_grid.tolist(), cap.u_values.tolist(),
            cap.curvature.tolist(), problem.target,
            _out_path(args, outputs.get("figure", "cap_profile.png")),
            f"{problem.mode} cap, target {problem.target:g}")
    print(f"solve-cap: {'PASS' if verdict.passes else 'FAIL'} "
          f"height={cap.max_height:.6f} bound={verdict.bound:.6f} ({path})")
    return EXIT_OK if verdict.passes else EXIT_FAIL


def cmd_sweep(cfg, args) -> int:
    space = build_space(cfg)
    sw = cfg["sweep"]
    targets = sw["targets"]
    if not targets:
        raise ConfigError("sweep needs at least one curvature target")

    f0 = np.exp(space.warp.value(0.0))
    rows = []
    all_pass = True
    for tgt in targets:
        bound = f0 / tgt if sw["mode"] == "cmc" else f0 / np.sqrt(tgt)
        if "apex_heights" in sw:
            heights = sw["apex_heights"]
        else:
            count = sw.get("apex_count", 10)
            heights = np.linspace(bound / count, 0.98 * bound, count)
        if len(heights) == 0:
            raise ConfigError("sweep apex range is empty")
        for h0 in heights:
            problem = CapProblem(mode=sw["mode"], space=space, target=tgt,
                                 apex_height=float(h0),
                                 r_max=sw.get("r_max", 10.0),
                                 profile_points=65)
            try:
                cap = shoot_cap(problem)
            except NoBoundaryReached:
                rows.append((float(h0), float(tgt), float("nan"),
                             float(bound), "no-boundary"))
                continue
            verdict = height_verdict(cap, problem)
            ok = verdict.passes
            all_pass = all_pass and ok
            rows.append((float(h0), float(tgt), cap.max_height,
                         float(bound), "true" if ok else "false"))

    table_path = _out_path(args, cfg.get("output", {}).get(
        "table", "sweep.csv"))
    header = ("apex", "H" if sw["mode"] == "cmc" else "Ke",
              "measuredHeight", "bound", "pass")
    dump_csv(table_path, header, rows)
    if not args.no_plots:
        figures.sweep_heights(
            rows,
            _out_path(args, cfg.get("output", {}).get(
                "figure", "sweep.png")),
            f"{sw['mode']} cap heights vs bound")
    reached = sum(1 for r in rows if r[4] != "no-boundary")
    print(f"sweep: {'PASS' if all_pass else 'FAIL'} "
          f"({reached}/{len(rows)} caps reached the slice; {table_path})")
    return EXIT_OK if all_pass else EXIT_FAIL


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="warpgeo",
        description="surface geometry verification and prescribed-curvature "
                    "graph solving in warped products")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify-compat", "verify-lemmas", "solve-cap", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--tol-scale", type=float, default=1.0,
                       dest="tol_scale")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-plots", action="store_true", dest="no_plots")
    args = parser.parse_args(argv)

    handlers = {
        "verify-compat": cmd_verify_compat,
        "verify-lemmas": cmd_verify_lemmas,
        "solve-cap": cmd_solve_cap,
        "sweep": cmd_sweep,
    }
    try:
        cfg = load_config(args.config, args.command)
        return handlers[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WarpGeoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
