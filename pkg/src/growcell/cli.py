"""Command-line entry points.

Subcommands:
  run                  execute a configured scenario, write metrics CSV,
                       snapshots, figures, and a machine-readable summary
  validate-diffusion   Gaussian-hill grid-convergence study
  validate-adiabatic   closed-cell hybrid run vs the 0D balance model
  metrics              crystal-shape and probe metrics from a snapshot
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import campaigns, config as cfgmod, reports
from .boxsim import AdiabaticBox3D
from .driver import Reactor2D, Sample
from .materials import c_sat
from .metrics import extract_sides, probes, quality
from .snapshot import read_snapshot, write_snapshot


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="growcell",
                                     description="single-crystal growth cell simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured scenario")
    p_run.add_argument("--config", required=True, help="path to the run configuration")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--threads", type=int, default=0)

    p_diff = sub.add_parser("validate-diffusion", help="grid convergence study")
    p_diff.add_argument("--out", default=None, help="output directory (optional)")

    p_adia = sub.add_parser("validate-adiabatic", help="closed-cell cross check")
    p_adia.add_argument("--out", default=None)
    p_adia.add_argument("--resolution", type=int, default=50)
    p_adia.add_argument("--paper", action="store_true",
                        help="published configuration (long unattended run)")
    p_adia.add_argument("--threads", type=int, default=0)

    p_met = sub.add_parser("metrics", help="shape metrics from a snapshot")
    p_met.add_argument("snapshot")
    p_met.add_argument("--out", default=None)
    p_met.add_argument("--orientation", type=float, default=0.0)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "validate-diffusion":
            return cmd_validate_diffusion(args)
        if args.command == "validate-adiabatic":
            return cmd_validate_adiabatic(args)
        if args.command == "metrics":
            return cmd_metrics(args)
    except cfgmod.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = cfgmod.load(args.config)
    kind = cfg.scenario_kind()
    out = reports.ensure_dir(args.out)
    cfg.write(os.path.join(out, "config.canonical"))

    if kind == "gaussian":
        return _run_diffusion(out)
    if kind == "adiabatic":
        box = cfg.to_box()
        if args.threads:
            box = box.with_updates(threads=args.threads)
        return _run_adiabatic(box, out)
    scenario = cfg.to_scenario()
    if args.threads:
        scenario = scenario.with_updates(threads=args.threads)
    snapshot_every = cfg.get("run", "snapshot_every_s")
    return _run_reactor(scenario, out, snapshot_every)


def _run_reactor(scenario, out, snapshot_every: float = 0.0) -> int:
    sim = Reactor2D(scenario)
    rows = []
    next_snap = [snapshot_every] if snapshot_every > 0 else [math.inf]
    snaps = []

    def cb(sample, sim_):
        rows.append(sample.row())
        if sample.t >= next_snap[0] - sim_.units.dt:
            path = os.path.join(out, f"snapshot_{int(round(sample.t)):08d}.gcs")
            write_snapshot(path,
                           {"phi": sim_.phi, "U": sim_.U, "T": sim_.T,
                            "ux": sim_.usx, "uy": sim_.usy},
                           sim_.mask.shape, sim_.config.dx, sample.t)
            snaps.append(path)
            next_snap[0] += snapshot_every

    samples = sim.run(cb)
    reports.write_csv(os.path.join(out, "metrics.csv"), Sample.HEADER, rows)

    final = samples[-1]
    umag = np.sqrt(sim.usx**2 + sim.usy**2) if sim.flow_enabled else None
    reports.field_figure(sim.phi, sim.U, sim.T, scenario.dx,
                         os.path.join(out, "fields.png"), umag)
    mid = sim.T.shape[1] // 2
    xs = np.arange(sim.T.shape[0]) * scenario.dx
    picks = [samples[len(samples) // 3], samples[2 * len(samples) // 3], samples[-1]]
    reports.centerline_figure(xs, [(f"t={final.t:.0f}s", sim.T[:, mid].copy())],
                              os.path.join(out, "centerline_T.png"))
    reports.history_figure(
        [("peak T", [s.t for s in samples], [s.peak_T for s in samples])],
        os.path.join(out, "peak_temperature.png"), "peak T [K]",
        "Peak temperature history")
    summary = {
        "t_end_s": final.t,
        "growth_rate_mm_h": final.rate_displacement,
        "growth_rate_cumulative_mm_h": final.rate_cumulative,
        "quality": final.quality,
        "peak_delta_T_K": final.delta_T,
        "crystal_area_mm2": final.crystal_area,
        "sides_mm": list(final.shape.sides) if final.shape else None,
        "snapshots": snaps,
    }
    reports.write_json(os.path.join(out, "summary.json"), summary)
    print(f"growth rate {final.rate_displacement:.5f} mm/h, "
          f"Q {final.quality:.3f}, peak dT {final.delta_T:.4f} K")
    return 0


def _run_diffusion(out) -> int:
    rep = campaigns.diffusion_convergence()
    rows = [(n, dx, err, campaigns.DIFFUSION_REFERENCE.get(n, math.nan))
            for n, dx, err in rep.rows()]
    for n, dx, err, ref in rows:
        print(f"grid {n:4d}^2  dx={dx:.4f} mm  l2={err:.4f}  published={ref:.4f}")
    print(f"fitted convergence order (three finest): {rep.order:.2f}")
    if out:
        reports.write_csv(os.path.join(out, "convergence.csv"),
                          ["grid", "dx_mm", "l2", "published"], rows)
        reports.convergence_figure(
            rep.dxs, rep.errors, os.path.join(out, "convergence.png"),
            [campaigns.DIFFUSION_REFERENCE.get(n) for n in rep.grids])
        reports.write_json(os.path.join(out, "convergence.json"),
                           {"grids": rep.grids, "dx_mm": rep.dxs,
                            "l2": rep.errors, "order": rep.order})
    return 0


def cmd_validate_diffusion(args) -> int:
    out = reports.ensure_dir(args.out) if args.out else None
    return _run_diffusion(out)


def _run_adiabatic(boxcfg, out) -> int:
    rep = campaigns.adiabatic_verification(boxcfg)
    last = rep.hybrid[-1]
    fin = rep.oracle.final()
    print(f"hybrid : c={last.c_liquid:.6e} R={last.radius:.5f} cm T={last.mean_T:.4f} K")
    print(f"oracle : c={fin.c:.6e} R={fin.R:.5f} cm T={fin.T:.4f} K")
    print(f"rel err: c={rep.rel_err_c:.3%} R={rep.rel_err_R:.3%} T={rep.rel_err_T:.4%}")
    print(f"saturation gap |c - c_sat(T)| = {rep.saturation_gap:.3e} mol/cm^3")
    if out:
        reports.write_csv(os.path.join(out, "hybrid_trajectory.csv"),
                          type(last).HEADER, [s.row() for s in rep.hybrid])
        rep.oracle.write_csv(os.path.join(out, "oracle_trajectory.csv"))
        reports.adiabatic_overlay_figure(rep.hybrid, rep.oracle,
                                         os.path.join(out, "adiabatic_overlay.png"))
        reports.heat_release_figure([s.t for s in rep.hybrid],
                                    [s.heat_rate for s in rep.hybrid],
                                    os.path.join(out, "heat_release.png"),
                                    "interface heat release [J per sample]")
        reports.write_json(os.path.join(out, "summary.json"), {
            "rel_err_c": rep.rel_err_c,
            "rel_err_R": rep.rel_err_R,
            "rel_err_T": rep.rel_err_T,
            "saturation_gap_mol_cm3": rep.saturation_gap,
            "hybrid_final": {"c": last.c_liquid, "R_cm": last.radius, "T_K": last.mean_T},
            "oracle_final": {"c": fin.c, "R_cm": fin.R, "T_K": fin.T},
        })
    return 0


def cmd_validate_adiabatic(args) -> int:
    out = reports.ensure_dir(args.out) if args.out else None
    if args.paper:
        boxcfg = campaigns.paper_box_config(resolution=args.resolution or 100)
    else:
        boxcfg = campaigns.desk_box_config(resolution=args.resolution)
    if args.threads:
        boxcfg = boxcfg.with_updates(threads=args.threads)
    return _run_adiabatic(boxcfg, out)


def cmd_metrics(args) -> int:
    meta, fields = read_snapshot(args.snapshot)
    if "phi" not in fields:
        print("error: snapshot has no phi field", file=sys.stderr)
        return 1
    shape = extract_sides(fields["phi"], meta.dx, args.orientation)
    q = quality(shape)
    line = (f"t={meta.time:.1f}s sides=" +
            "/".join(f"{s:.4f}" for s in shape.sides) + f" mm, Q={q:.4f}")
    if "T" in fields:
        peak, loc, _ = probes(fields["T"], dx=meta.dx)
        line += f", peak T={peak:.4f} K at {loc}"
    print(line)
    if args.out:
        out = reports.ensure_dir(args.out)
        reports.write_csv(os.path.join(out, "shape.csv"),
                          ["L1_mm", "L2_mm", "L3_mm", "L4_mm", "L5_mm", "L6_mm", "Q"],
                          [[*shape.sides, q]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
