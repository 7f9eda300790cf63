"""Command-line entry point.

Subcommands: eval, operator-test, simulate, cms, pole-check, quantum.
Each reads a JSON config (--config) and/or inline flag overrides,
writes CSV series plus a JSON manifest (and a rendered PNG figure) into
the output directory, and prints a short human-readable summary.

Exit codes: 0 all in-run checks passed, 2 configuration error,
3 numerical failure (including failed checks), 4 I/O error.
The output directory is taken from --out-dir, the NCILW_OUTPUT_DIR
environment variable, or the config, in that order.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import reporting
from .cms import CMSCase, PhaseState, cms_energy, leapfrog
from .config import parse_config, validate_config
from .elliptic import EllipticParams, c_const, g_const, wp1, wp1_shifted, zeta1
from .errors import BlowUp, IoError, NcilwError, SchemaError
from .pde import EquationSpec, SimState, SolverConfig, initial_field, invariants, run
from .poles import PoleState, bo_residual, constrained_velocities, pole_evolve, pole_to_field
from .quantum import (
    SectorSpec,
    build_generalized,
    diagonalize,
    richardson_ground_energy,
    swap_symmetry_check,
)
from .spectral import (
    Field,
    PeriodicGrid,
    build_multipliers,
    from_spectrum,
    hilbert,
    to_spectrum,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _load(args, subcommand, required=True):
    """Merge config file and inline overrides, then validate."""
    data = {}
    if args.config:
        data = parse_config(args.config, subcommand)
    overrides = {
        k.replace("-", "_"): v
        for k, v in vars(args).items()
        if k not in ("config", "out_dir", "func", "subcommand") and v is not None
    }
    data.update(overrides)
    if not data and required:
        raise SchemaError("no configuration provided (use --config or flags)")
    return validate_config(data, subcommand)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def run_eval(args):
    cfg = _load(args, "eval")
    params = EllipticParams(cfg["ell"], cfg["delta"])
    fn = cfg["function"]
    if fn == "wp1":
        val = wp1(cfg["x"], params)
        val = val.real if abs(val.imag) < 1e-10 * max(1.0, abs(val)) else val
    elif fn == "zeta1":
        val = zeta1(cfg["x"], params)
        val = val.real if abs(val.imag) < 1e-10 * max(1.0, abs(val)) else val
    elif fn == "wp1_shifted":
        val = wp1_shifted(cfg["x"], params)
    elif fn == "c_const":
        val = c_const(cfg["n_particles"], cfg["g"], params)
    else:
        val = g_const(params)
    arg = f"({cfg['x']}; " if "x" in cfg and fn not in ("c_const", "g_const") else "("
    print(f"{fn}{arg}ell={cfg['ell']}, delta={cfg['delta']}) = {val:.15g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# operator-test
# ---------------------------------------------------------------------------


def run_operator_test(args):
    cfg = _load(args, "operator-test")
    out = reporting.resolve_out_dir(args.out_dir, cfg.get("out_dir"))
    grid = PeriodicGrid(cfg["m_points"], cfg["ell"])
    params = EllipticParams(cfg["ell"], cfg["delta"])
    tables = {op: build_multipliers(op, grid, params) for op in cfg["operators"]}

    order = np.argsort(grid.mode_numbers)
    for op, table in tables.items():
        rows = [
            (int(grid.mode_numbers[i]), float(grid.wavenumbers[i]),
             float(table.sigma[i].real), float(table.sigma[i].imag))
            for i in order
        ]
        reporting.write_csv(
            os.path.join(out, f"operator_{op}.csv"),
            ["n", "k", "re_sigma", "im_sigma"],
            rows,
        )

    checks = []
    if "H" in tables:
        rng = np.random.default_rng(0)
        s = to_spectrum(Field(grid, rng.standard_normal(grid.m_points)))
        # H^2 = -I holds on the mean-zero, Nyquist-free band
        s.coeffs[grid.mode_numbers == 0] = 0.0
        s.coeffs[np.abs(grid.mode_numbers) == grid.m_points // 2] = 0.0
        f = from_spectrum(s)
        dev = float(np.max(np.abs(hilbert(hilbert(f, params), params).values + f.values)))
        checks.append({"name": "hilbert_involution", "value": dev, "passed": dev < 1e-8})
    extras = {}
    if "H" in tables and "T" in tables:
        t_to_h = float(np.max(np.abs(tables["T"].sigma - tables["H"].sigma)))
        extras["t_to_h_discrepancy"] = t_to_h
        print(f"max |sigma_T - sigma_H| at delta/ell = "
              f"{cfg['delta'] / cfg['ell']:g}: {t_to_h:.3e}")
    if "Ttilde" in tables:
        extras["ttilde_magnitude"] = float(np.max(np.abs(tables["Ttilde"].sigma)))

    fig, ax = reporting.new_figure()
    for op, table in tables.items():
        ax.plot(grid.wavenumbers[order], table.sigma[order].imag, label=op)
    ax.set_xlabel("k")
    ax.set_ylabel("Im sigma")
    ax.legend()
    reporting.save_figure(fig, os.path.join(out, "multipliers.png"))

    manifest = reporting.make_manifest("operator-test", cfg, checks, extras)
    reporting.write_json(os.path.join(out, "operator_report.json"), manifest)
    print(f"operator tables for {sorted(tables)} written to {out}")
    return EXIT_OK if manifest["passed"] else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _build_initial(cfg, key, grid):
    init = dict(cfg[key])
    preset = init.pop("preset")
    if preset == "soliton-approximant" and "kdv_delta" in cfg:
        init.setdefault("kdv_delta", cfg["kdv_delta"])
    return initial_field(preset, grid, **init)


def run_simulate(args):
    cfg = _load(args, "simulate")
    out = reporting.resolve_out_dir(args.out_dir, cfg.get("out_dir"))
    grid = PeriodicGrid(cfg["m_points"], cfg["ell"])
    params = (
        EllipticParams(cfg["ell"], cfg["delta"]) if "delta" in cfg else None
    )
    spec = EquationSpec(cfg["kind"], params=params, kdv_delta=cfg.get("kdv_delta"))
    n_steps = max(1, int(round(cfg["t_end"] / cfg["dt"])))
    solver = SolverConfig(
        dt=cfg["dt"],
        n_steps=n_steps,
        dealias=cfg["dealias"],
        invariant_every=cfg["invariant_every"],
        snapshot_every=cfg["snapshot_every"],
    )
    u0 = _build_initial(cfg, "initial", grid)
    v0 = None
    if spec.kind == "ncILW":
        v0 = (
            _build_initial(cfg, "initial_v", grid)
            if "initial_v" in cfg
            else Field(grid, np.zeros(grid.m_points))
        )

    try:
        snapshots, records = run(SimState(0.0, u0, v0), spec, solver)
    except BlowUp as exc:
        manifest = reporting.make_manifest(
            "simulate", cfg, [{"name": "completed", "passed": False}],
            {"error": str(exc)}, partial=True,
        )
        reporting.write_json(os.path.join(out, "simulate_manifest.json"), manifest)
        print(f"blow-up detected: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    snap_rows = []
    for s in snapshots:
        v_vals = s.v.values if s.v is not None else np.zeros(grid.m_points)
        for x, uu, vv in zip(grid.nodes, s.u.values, v_vals):
            snap_rows.append((float(s.t), float(x), float(uu), float(vv)))
    reporting.write_csv(
        os.path.join(out, "snapshots.csv"), ["t", "x", "u", "v"], snap_rows
    )
    inv_keys = ["t", "mass_u", "mass_v", "momentum", "energy"]
    reporting.write_csv(
        os.path.join(out, "invariants.csv"),
        inv_keys,
        [[float(r[k]) for k in inv_keys] for r in records],
    )

    drifts = {
        k: float(max(abs(r[k] - records[0][k]) for r in records))
        for k in ("mass_u", "mass_v", "momentum", "energy")
    }
    e_scale = max(abs(records[0]["energy"]), 1.0)
    checks = [
        {"name": "mass_u_drift", "value": drifts["mass_u"],
         "passed": drifts["mass_u"] < cfg["mass_tol"]},
        {"name": "mass_v_drift", "value": drifts["mass_v"],
         "passed": drifts["mass_v"] < cfg["mass_tol"]},
        {"name": "energy_drift_rel", "value": drifts["energy"] / e_scale,
         "passed": drifts["energy"] / e_scale < cfg["energy_tol"]},
    ]

    fig, ax = reporting.new_figure()
    ax.plot(grid.nodes, snapshots[-1].u.values, label="u(T)")
    if snapshots[-1].v is not None:
        ax.plot(grid.nodes, snapshots[-1].v.values, label="v(T)")
    ax.plot(grid.nodes, snapshots[0].u.values, "--", label="u(0)", alpha=0.6)
    ax.set_xlabel("x")
    ax.legend()
    ax.set_title(f"{spec.kind}, T = {cfg['t_end']}")
    reporting.save_figure(fig, os.path.join(out, "fields.png"))

    manifest = reporting.make_manifest(
        "simulate", cfg, checks, {"drifts": drifts, "n_steps": n_steps}
    )
    reporting.write_json(os.path.join(out, "simulate_manifest.json"), manifest)
    for c in checks:
        print(f"  {c['name']}: {c['value']:.3e} ({'ok' if c['passed'] else 'FAIL'})")
    return EXIT_OK if manifest["passed"] else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# cms
# ---------------------------------------------------------------------------


def run_cms(args):
    cfg = _load(args, "cms")
    out = reporting.resolve_out_dir(args.out_dir, cfg.get("out_dir"))
    params = (
        EllipticParams(cfg["ell"], cfg["delta"])
        if "ell" in cfg and "delta" in cfg
        else None
    )
    case = CMSCase(cfg["case"], params)
    state = PhaseState(np.array(cfg["positions"]), np.array(cfg["momenta"]))
    n = state.n_particles
    e0 = cms_energy(state, case, cfg["g2"])
    p0 = float(np.sum(state.momenta))

    rows = []

    def record(t, st):
        rows.append(
            [float(t)]
            + [float(v) for v in st.reduced_positions(case)]
            + [float(v) for v in st.momenta]
        )

    record(0.0, state)
    cur = state
    done = 0
    while done < cfg["n_steps"]:
        chunk = min(cfg["record_every"], cfg["n_steps"] - done)
        cur = leapfrog(cur, case, cfg["g2"], cfg["dt"], chunk)
        done += chunk
        record(done * cfg["dt"], cur)

    header = ["t"] + [f"x_{j + 1}" for j in range(n)] + [f"p_{j + 1}" for j in range(n)]
    reporting.write_csv(os.path.join(out, "trajectory.csv"), header, rows)

    e_drift = abs(cms_energy(cur, case, cfg["g2"]) - e0)
    p_drift = abs(float(np.sum(cur.momenta)) - p0)
    checks = [
        {"name": "energy_drift", "value": e_drift, "passed": e_drift < cfg["energy_tol"]},
        {"name": "momentum_drift", "value": p_drift, "passed": p_drift < 1e-10},
    ]
    fig, ax = reporting.new_figure()
    data = np.array(rows)
    for j in range(n):
        ax.plot(data[:, 0], data[:, 1 + j], label=f"x_{j + 1}")
    ax.set_xlabel("t")
    ax.set_ylabel("position")
    ax.legend()
    reporting.save_figure(fig, os.path.join(out, "trajectory.png"))

    manifest = reporting.make_manifest(
        "cms", cfg, checks, {"energy_initial": e0, "momentum_initial": p0}
    )
    reporting.write_json(os.path.join(out, "cms_manifest.json"), manifest)
    print(f"energy drift {e_drift:.3e}, momentum drift {p_drift:.3e}")
    return EXIT_OK if manifest["passed"] else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# pole-check
# ---------------------------------------------------------------------------


def run_pole_check(args):
    cfg = _load(args, "pole-check")
    out = reporting.resolve_out_dir(args.out_dir, cfg.get("out_dir"))
    grid = PeriodicGrid(cfg["m_points"], cfg["ell"])
    params = EllipticParams(cfg["ell"], cfg["delta"])
    case = CMSCase("trigonometric", params)
    poles = np.array([complex(re, im) for re, im in cfg["poles"]])
    try:
        state = PoleState(poles)
    except ValueError as exc:
        raise SchemaError(f"poles: {exc}", field="poles") from exc
    state, fit_resid = constrained_velocities(state, grid, params)
    n_steps = max(1, int(round(cfg["t_end"] / cfg["dt"])))

    rows = [[0.0] + [v for a in state.poles for v in (a.real, a.imag)]]
    cur = state
    chunk = max(1, n_steps // 50)
    done = 0
    while done < n_steps:
        m = min(chunk, n_steps - done)
        cur = pole_evolve(cur, case, cfg["dt"], m)
        done += m
        rows.append(
            [done * cfg["dt"]] + [v for a in cur.poles for v in (a.real, a.imag)]
        )
    header = ["t"] + [
        f"{part}_a{j + 1}" for j in range(len(poles)) for part in ("re", "im")
    ]
    reporting.write_csv(os.path.join(out, "poles.csv"), header, rows)

    u_pole = pole_to_field(cur, grid)
    spec = EquationSpec("BO", params=params)
    solver = SolverConfig(dt=cfg["dt"], n_steps=n_steps, invariant_every=0)
    snaps, _ = run(SimState(0.0, pole_to_field(state, grid)), spec, solver)
    deviation = float(np.max(np.abs(u_pole.values - snaps[-1].u.values)))
    residual = bo_residual(cur, grid, params)
    checks = [
        {"name": "field_deviation", "value": deviation,
         "passed": deviation < cfg["deviation_tol"]},
        {"name": "bo_residual", "value": residual,
         "passed": residual < cfg["deviation_tol"]},
    ]

    fig, ax = reporting.new_figure()
    ax.plot(grid.nodes, snaps[-1].u.values, label="BO solver")
    ax.plot(grid.nodes, u_pole.values, "--", label="pole ansatz")
    ax.set_xlabel("x")
    ax.legend()
    ax.set_title(f"T = {cfg['t_end']}, N = {len(poles)} poles")
    reporting.save_figure(fig, os.path.join(out, "pole_field.png"))

    manifest = reporting.make_manifest(
        "pole-check", cfg, checks, {"velocity_fit_residual": fit_resid}
    )
    reporting.write_json(os.path.join(out, "pole_report.json"), manifest)
    print(f"field deviation {deviation:.3e}, BO residual {residual:.3e}")
    return EXIT_OK if manifest["passed"] else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# quantum
# ---------------------------------------------------------------------------


def run_quantum(args):
    cfg = _load(args, "quantum")
    out = reporting.resolve_out_dir(args.out_dir, cfg.get("out_dir"))
    params = EllipticParams(cfg["ell"], cfg["delta"])
    n1, m1, n2, m2 = cfg["sector"]
    sector = SectorSpec(n1, m1, n2, m2, cfg["g"], params)

    rows = []
    for n in cfg["grids"]:
        vals = diagonalize(
            build_generalized(sector, n, order=cfg["order"]),
            k=cfg["n_eigenvalues"],
        )
        rows.extend((n, i, float(v)) for i, v in enumerate(vals))
    reporting.write_csv(
        os.path.join(out, "eigenvalues.csv"), ["n_points", "index", "value"], rows
    )

    extrap, raw = richardson_ground_energy(
        lambda n: build_generalized(sector, n, order=cfg["order"]),
        cfg["grids"],
        order=cfg["order"],
    )
    stability = abs(extrap[-1] - extrap[-2]) if len(extrap) > 1 else float("inf")
    swap = swap_symmetry_check(sector, min(cfg["grids"]), order=cfg["order"])
    checks = [
        {"name": "ground_energy_stability", "value": stability,
         "passed": stability < cfg["stability_tol"]},
        {"name": "swap_symmetry", "value": swap["max_entry_deviation"],
         "passed": swap["passed"]},
    ]

    fig, ax = reporting.new_figure()
    ax.plot([1.0 / n**2 for n in cfg["grids"]], raw, "o-", label="raw")
    ax.axhline(extrap[-1], color="k", ls="--", label="extrapolated")
    ax.set_xlabel("1 / n_points^2")
    ax.set_ylabel("ground eigenvalue")
    ax.legend()
    reporting.save_figure(fig, os.path.join(out, "convergence.png"))

    manifest = reporting.make_manifest(
        "quantum", cfg, checks,
        {"raw": [float(v) for v in raw],
         "extrapolated": [float(v) for v in extrap]},
    )
    reporting.write_json(os.path.join(out, "quantum_report.json"), manifest)
    print(f"ground eigenvalue {extrap[-1]:.12g} (stability {stability:.3e})")
    return EXIT_OK if manifest["passed"] else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# argument parsing / dispatch
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ncilw",
        description="Numerical laboratory for elliptic soliton structures",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, flags):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out-dir", help="output directory")
        for flag, kw in flags:
            p.add_argument(flag, **kw)
        p.set_defaults(func=func)
        return p

    add("eval", run_eval, [
        ("function", {"nargs": "?", "choices":
            ["wp1", "zeta1", "wp1_shifted", "c_const", "g_const"]}),
        ("--x", {"type": float}),
        ("--ell", {"type": float}),
        ("--delta", {"type": float}),
        ("--n-particles", {"type": int}),
        ("--g", {"type": float}),
    ])
    add("operator-test", run_operator_test, [
        ("--m-points", {"type": int}),
        ("--ell", {"type": float}),
        ("--delta", {"type": float}),
    ])
    add("simulate", run_simulate, [
        ("--kind", {"choices": ["KdV", "BO", "ILW", "ncILW"]}),
        ("--dt", {"type": float}),
        ("--t-end", {"type": float}),
    ])
    add("cms", run_cms, [
        ("--dt", {"type": float}),
        ("--n-steps", {"type": int}),
    ])
    add("pole-check", run_pole_check, [
        ("--dt", {"type": float}),
        ("--t-end", {"type": float}),
    ])
    add("quantum", run_quantum, [
        ("--g", {"type": float}),
    ])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(json.dumps({"error": "config", "message": str(exc),
                          "field": exc.field}), file=sys.stderr)
        return EXIT_CONFIG
    except IoError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return EXIT_IO
    except NcilwError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
