"""Command-line surface: eval | verify | scan | expand | dirichlet | maximal | fatou.

A single JSON config drives every subcommand; complex numbers are {re, im}
pairs, all tolerances are explicit (``--dump-defaults`` prints them), and
the run seed fixes every random draw.  CSV outputs carry a header comment
with the package version and a hash of the effective config, so a result
file is traceable to the exact inputs.  Exit codes: 0 ok, 1 verify
failures, 2 invalid config, 3 numerical guard tripped.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, expansion, fatou, kernel, maximal, poisson, verify
from .errors import (DivergenceError, ParameterError, PoleError, PolyharmError,
                     RadiusError, SlowConvergenceError)
from .geometry import PolyPoint, StolzCone, TorusGrid, TorusPoint

DEFAULT_CONFIG = {
    "version": 1,
    "params": {
        "alpha": [{"re": 0.0, "im": 0.0}],
        "beta": [{"re": 0.0, "im": 0.0}],
    },
    "seed": 0,
    "workers": 1,
    "out": ".",
    "tolerances": dict(verify.DEFAULT_TOLERANCES),
    "eval": {
        "target": "kernel",
        "zeta": [0.0],
        "queries": [{"radii": [0.5], "angles": [0.0]}],
        "data": {"type": "ones", "sizes": [64]},
    },
    "expand": {
        "max_order": 8,
        "data": {"type": "modes", "sizes": [64],
                 "modes": [{"m": [1], "re": 1.0, "im": 0.0}]},
        "queries": [{"radii": [0.5], "angles": [0.0]}],
    },
    "dirichlet": {
        "data": {"type": "modes", "sizes": [64],
                 "modes": [{"m": [1], "re": 0.5, "im": 0.0},
                           {"m": [-1], "re": 0.5, "im": 0.0}]},
        "queries": [{"radii": [0.5], "angles": [0.0]}],
        "residual": True,
    },
    "maximal": {
        "measure": [{"angles": [0.0], "re": 1.0, "im": 0.0}],
        "gamma": [0],
        "q": 0.5,
        "gamma_cap": 8,
        "centers": 256,
    },
    "fatou": {
        "data": {"type": "modes", "sizes": [16],
                 "modes": [{"m": [0], "re": 1.0, "im": 0.0},
                           {"m": [1], "re": 0.2, "im": 0.0},
                           {"m": [-1], "re": 0.2, "im": 0.0}]},
        "vertices": [32],
        "aperture": 2.0,
        "restriction": 2.0,
        "tol": 1e-3,
        "paths": 4,
        "steps": 32,
    },
    "scan": {
        "kind": "weak11",
        "lambdas": {"start": 0.1, "stop": 100.0, "count": 13},
        "trials": 20,
        "max_atoms": 8,
        "centers": 256,
        "q": 0.5,
        "gamma": [0],
        "ladder": [0.5, 0.9, 0.99, 0.999],
        "norms": [1, 2, "inf"],
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _complex_of(obj) -> complex:
    if isinstance(obj, dict):
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    return complex(obj)


def load_config(path: str | None, overrides: dict) -> dict:
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            config = _merge(config, json.load(fh))
    for key, val in overrides.items():
        if val is not None:
            config[key] = val
    return config


def config_hash(config: dict) -> str:
    # execution knobs never change results, so they stay out of the hash
    canon = {k: v for k, v in config.items() if k not in ("workers", "out")}
    text = json.dumps(canon, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def params_of(config: dict) -> kernel.Params:
    block = config["params"]
    alpha = [_complex_of(v) for v in block["alpha"]]
    beta = [_complex_of(v) for v in block["beta"]]
    return kernel.validate(alpha, beta)


def grid_function_of(spec: dict, n: int) -> poisson.GridFunction:
    kind = spec.get("type", "modes")
    sizes = spec.get("sizes", [64])
    if len(sizes) == 1 and n > 1:
        sizes = list(sizes) * n
    grid = TorusGrid(sizes)
    if kind == "ones":
        return poisson.GridFunction(grid, np.ones(grid.sizes, dtype=complex))
    if kind == "grid":
        return poisson.GridFunction.from_json_obj(spec)
    if kind == "modes":
        mesh = grid.angle_mesh()
        values = np.zeros(grid.sizes, dtype=complex)
        for mode in spec.get("modes", []):
            m = mode["m"]
            c = _complex_of(mode)
            phase = np.zeros(grid.sizes)
            for ax in range(grid.n):
                phase = phase + m[ax] * mesh[ax]
            values = values + c * np.exp(1j * phase)
        return poisson.GridFunction(grid, values)
    raise ValueError(f"unknown data type {kind!r}")


def measure_of(spec: list) -> poisson.AtomicMeasure:
    return poisson.AtomicMeasure(
        [(TorusPoint(d["angles"]), _complex_of(d)) for d in spec])


def query_points(specs: list) -> list[PolyPoint]:
    return [PolyPoint(d["radii"], d["angles"]) for d in specs]


def _csv_header(config: dict, columns: list[str]) -> list[str]:
    return [f"# polyharm {__version__} config={config_hash(config)}",
            ",".join(columns)]


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_lines(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_eval(config: dict, out_dir: Path) -> int:
    params = params_of(config)
    block = config["eval"]
    queries = query_points(block["queries"])
    target = block.get("target", "kernel")
    rows = []
    if target == "kernel":
        zeta = TorusPoint(block.get("zeta", [0.0] * params.n))
        for z in queries:
            val = kernel.poisson_kernel(params, z, zeta)
            rows.append((z, val))
    elif target == "poisson":
        f = grid_function_of(block["data"], params.n)
        for z in queries:
            rows.append((z, poisson.poisson_of_function(params, f, z)))
    elif target == "expansion":
        f = grid_function_of(block["data"], params.n)
        coeffs = expansion.extract_coeffs(params, f.values,
                                          max_order=block.get("max_order", 8))
        for z in queries:
            rows.append((z, expansion.synthesize(params, coeffs, z)))
    else:
        raise ValueError(f"unknown eval target {target!r}")
    lines = _csv_header(config, ["radii", "angles", "re", "im"])
    for z, val in rows:
        lines.append(",".join([
            ";".join(_fmt(r) for r in z.radii),
            ";".join(_fmt(a) for a in z.angles),
            _fmt(val.real), _fmt(val.imag)]))
    _write_lines(out_dir / "eval.csv", lines)
    print(f"eval: wrote {len(rows)} rows to {out_dir / 'eval.csv'}")
    return 0


def cmd_verify(config: dict, out_dir: Path) -> int:
    params_of(config)  # config params must validate even though suites pick their own
    results = verify.run_suites(config.get("tolerances", {}), int(config["seed"]),
                                int(config.get("workers", 1)))
    ok = all(r["passes"] == r["cases"] for r in results)
    report = {
        "version": __version__,
        "config": config_hash(config),
        "seed": int(config["seed"]),
        "ok": ok,
        "suites": results,
    }
    text = json.dumps(report, sort_keys=True, indent=2)
    _write_lines(out_dir / "verify_report.json", [text])
    print(text)
    if not ok:
        failing = [r["suite"] for r in results if r["passes"] != r["cases"]]
        print(f"verify: FAILED suites: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


def _gnuplot_script(csv_name: str, title: str, logscale: bool) -> list[str]:
    lines = [f'set datafile separator ","', f'set title "{title}"', "set key left"]
    if logscale:
        lines.append("set logscale xy")
    lines.append(f'plot "{csv_name}" using 1:2 with linespoints title "measured", \\')
    lines.append(f'     "{csv_name}" using 1:3 with lines title "bound"')
    return lines


def cmd_scan(config: dict, out_dir: Path) -> int:
    params = params_of(config)
    block = config["scan"]
    kind = block.get("kind", "weak11")
    rng = np.random.default_rng(int(config["seed"]))
    if kind == "weak11":
        lam = block["lambdas"]
        lambdas = np.geomspace(lam["start"], lam["stop"], int(lam["count"]))
        grid = TorusGrid([int(block.get("centers", 256))] * params.n)
        max_atoms = int(block.get("max_atoms", 8))

        def gen(r):
            k = int(r.integers(1, max_atoms + 1))
            return poisson.AtomicMeasure(
                [(TorusPoint(r.uniform(-math.pi, math.pi, size=params.n)),
                  complex(r.normal(), r.normal())) for _ in range(k)])

        report = maximal.weak11_experiment(
            "mq" if block.get("q") else "gamma", gen, lambdas,
            trials=int(block.get("trials", 20)), center_grid=grid, rng=rng,
            gamma=block.get("gamma"), q=block.get("q"),
            gamma_cap=int(block.get("gamma_cap", 8)))
        lines = _csv_header(config, ["lambda", "measured", "bound"])
        for lam_v, meas, bound in report.rows():
            lines.append(f"{_fmt(lam_v)},{_fmt(meas)},{_fmt(bound)}")
        _write_lines(out_dir / "weak11.csv", lines)
        _write_lines(out_dir / "weak11.gp",
                     _gnuplot_script("weak11.csv", "level-set measure vs bound", True))
        print(f"scan weak11: {report.trials} trials, violations={report.violations}")
        return 0 if report.violations == 0 else 1
    if kind == "convergence":
        f = grid_function_of(block.get("data", config["dirichlet"]["data"]), params.n)
        ladder = [float(r) for r in block.get("ladder", [0.5, 0.9, 0.99, 0.999])]
        norms = [math.inf if str(p) == "inf" else float(p)
                 for p in block.get("norms", [1, 2, "inf"])]
        columns = ["r"] + [f"norm_p{p}" for p in block.get("norms", [1, 2, "inf"])]
        lines = _csv_header(config, columns)
        table = {p: poisson.boundary_convergence(params, f, p, ladder) for p in norms}
        for i, r in enumerate(ladder):
            lines.append(",".join([_fmt(r)] + [_fmt(table[p][i]) for p in norms]))
        _write_lines(out_dir / "convergence.csv", lines)
        _write_lines(out_dir / "convergence.gp",
                     _gnuplot_script("convergence.csv", "boundary norm convergence", False))
        print(f"scan convergence: ladder {ladder}")
        return 0
    if kind == "fatou":
        fat = config["fatou"]
        f = grid_function_of(fat["data"], params.n)
        vgrid = TorusGrid(fat["vertices"] * params.n
                          if len(fat["vertices"]) == 1 else fat["vertices"])
        summary = fatou.fatou_sweep(params, f, vgrid, float(fat["aperture"]),
                                    float(fat["restriction"]), tol=float(fat["tol"]),
                                    paths=int(fat["paths"]), steps=int(fat["steps"]))
        lines = _csv_header(config, ["angles", "estimate_re", "estimate_im",
                                     "target_re", "target_im", "error"])
        est = summary.estimates.reshape(-1)
        tgt = summary.targets.reshape(-1)
        for pt, e, t in zip(vgrid.points(), est, tgt):
            lines.append(",".join([
                ";".join(_fmt(a) for a in pt.angles),
                _fmt(e.real), _fmt(e.imag), _fmt(t.real), _fmt(t.imag),
                _fmt(abs(e - t))]))
        _write_lines(out_dir / "fatou.csv", lines)
        print(f"scan fatou: fraction={summary.fraction} checked={summary.checked} "
              f"excluded={summary.excluded}")
        return 0
    raise ValueError(f"unknown scan kind {kind!r}")


def cmd_expand(config: dict, out_dir: Path) -> int:
    params = params_of(config)
    block = config["expand"]
    f = grid_function_of(block["data"], params.n)
    coeffs = expansion.extract_coeffs(params, f.values,
                                      max_order=int(block.get("max_order", 8)))
    _write_lines(out_dir / "coeffs.json",
                 [json.dumps(coeffs.to_json_obj(), sort_keys=True, indent=2)])
    lines = _csv_header(config, ["radii", "angles", "re", "im"])
    for z in query_points(block.get("queries", [])):
        val = expansion.synthesize(params, coeffs, z)
        lines.append(",".join([
            ";".join(_fmt(r) for r in z.radii),
            ";".join(_fmt(a) for a in z.angles),
            _fmt(val.real), _fmt(val.imag)]))
    _write_lines(out_dir / "expand.csv", lines)
    print(f"expand: {len(coeffs.table)} coefficients (max order {coeffs.max_order})")
    return 0


def cmd_dirichlet(config: dict, out_dir: Path) -> int:
    params = params_of(config)
    block = config["dirichlet"]
    f = grid_function_of(block["data"], params.n)
    queries = query_points(block["queries"])
    values = poisson.dirichlet_solve(params, f, queries)
    want_residual = bool(block.get("residual", False))
    columns = ["radii", "angles", "re", "im"] + (["residual"] if want_residual else [])
    lines = _csv_header(config, columns)
    for z, val in zip(queries, values):
        row = [";".join(_fmt(r) for r in z.radii),
               ";".join(_fmt(a) for a in z.angles),
               _fmt(val.real), _fmt(val.imag)]
        if want_residual:
            row.append(_fmt(poisson.dirichlet_residual(params, f, z)))
        lines.append(",".join(row))
    _write_lines(out_dir / "dirichlet.csv", lines)
    print(f"dirichlet: wrote {len(values)} rows")
    return 0


def cmd_maximal(config: dict, out_dir: Path) -> int:
    params = params_of(config)
    block = config["maximal"]
    mu = measure_of(block["measure"])
    grid = TorusGrid([int(block.get("centers", 256))] * params.n)
    centers = np.asarray([list(pt.angles) for pt in grid.points()])
    gvals = maximal.m_gamma_grid(mu, block.get("gamma", [0] * params.n), centers)
    qvals = maximal.m_q_grid(mu, float(block.get("q", 0.5)), centers,
                             gamma_cap=int(block.get("gamma_cap", 8)))
    lines = _csv_header(config, ["angles", "m_gamma", "m_q"])
    for ang, gv, qv in zip(centers, gvals, qvals):
        lines.append(",".join([";".join(_fmt(a) for a in ang), _fmt(gv), _fmt(qv)]))
    _write_lines(out_dir / "maximal.csv", lines)
    print(f"maximal: scanned {len(centers)} centers")
    return 0


def cmd_fatou(config: dict, out_dir: Path) -> int:
    params = params_of(config)
    block = config["fatou"]
    f = grid_function_of(block["data"], params.n)
    vgrid = TorusGrid(block["vertices"] * params.n
                      if len(block["vertices"]) == 1 else block["vertices"])
    summary = fatou.fatou_sweep(params, f, vgrid, float(block["aperture"]),
                                float(block["restriction"]), tol=float(block["tol"]),
                                paths=int(block["paths"]), steps=int(block["steps"]))
    report = {
        "fraction": summary.fraction,
        "checked": summary.checked,
        "excluded": summary.excluded,
        "tol": summary.tol,
        "failures": [{"angles": fdict["angles"], "error": fdict["error"]}
                     for fdict in summary.failures],
    }
    _write_lines(out_dir / "fatou_summary.json",
                 [json.dumps(report, sort_keys=True, indent=2)])
    print(json.dumps(report, sort_keys=True))
    return 0


COMMANDS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "expand": cmd_expand,
    "dirichlet": cmd_dirichlet,
    "maximal": cmd_maximal,
    "fatou": cmd_fatou,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="polyharm",
                                     description="polydisc harmonic-analysis toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS), nargs="?",
                        help="subcommand to run")
    parser.add_argument("--config", type=str, default=None, help="JSON config path")
    parser.add_argument("--seed", type=int, default=None, help="override run seed")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker count (never changes results)")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument("--dump-defaults", action="store_true",
                        help="print the default config and exit")
    args = parser.parse_args(argv)

    if args.dump_defaults:
        print(json.dumps(DEFAULT_CONFIG, sort_keys=True, indent=2))
        return 0
    if args.command is None:
        parser.error("a command is required (or --dump-defaults)")

    try:
        config = load_config(args.config, {"seed": args.seed, "workers": args.workers,
                                           "out": args.out})
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(config.get("out", "."))
    try:
        return COMMANDS[args.command](config, out_dir)
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RadiusError, SlowConvergenceError, DivergenceError, PoleError) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    except PolyharmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
