"""Figure rendering for run reports and validation campaigns.

Every CLI report path writes PNG figures next to the delimited output:
convergence plots, trajectory overlays, field maps with the crystal
outline, centerline profiles, and peak-temperature histories.
"""

from __future__ import annotations

import csv
import json
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.savefig(path, dpi=140, bbox_inches="tight")
    plt.close(fig)
    return path


def write_csv(path, header, rows) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return str(path)


def write_json(path, payload) -> str:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return str(path)


def convergence_figure(dxs, errors, path, reference=None):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(dxs, errors, "ko-", label="simulation")
    if reference:
        ax.loglog(dxs, reference, "s--", color="tab:gray", label="published")
    anchor = errors[-1]
    guide = [anchor * (dx / dxs[-1]) ** 4 for dx in dxs]
    ax.loglog(dxs, guide, "k:", label=r"slope $-4$")
    ax.set_xlabel("grid spacing [mm]")
    ax.set_ylabel(r"relative $\ell^2$ error")
    ax.legend(frameon=False)
    ax.set_title("Diffusion self-convergence")
    return _save(fig, path)


def adiabatic_overlay_figure(hybrid_samples, oracle, path):
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    th = [s.t for s in hybrid_samples]
    to = oracle.times
    panels = [
        ("concentration [mol/cm$^3$]", [s.c_liquid for s in hybrid_samples], oracle.c),
        ("radius [cm]", [s.radius for s in hybrid_samples], oracle.R),
        ("temperature [K]", [s.mean_T for s in hybrid_samples], oracle.T),
    ]
    for ax, (label, hy, orc) in zip(axes, panels):
        ax.semilogx(_nz(to), orc, "-", color="tab:gray", label="balance model")
        ax.semilogx(_nz(th), hy, "k.", ms=4, label="hybrid solver")
        ax.set_xlabel("time [s]")
        ax.set_ylabel(label)
    axes[0].legend(frameon=False, fontsize=8)
    fig.suptitle("Closed adiabatic cell: hybrid solver vs balance model "
                 "(clocks differ; the shared fixed point is the check)")
    fig.tight_layout()
    return _save(fig, path)


def _nz(times):
    return [max(t, 1e-3) for t in times]


def heat_release_figure(times, rates, path, ylabel="heat release [J/s]"):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.semilogx(_nz(times), rates, "k-")
    ax.set_xlabel("time [s]")
    ax.set_ylabel(ylabel)
    ax.set_title("Interface heat release")
    return _save(fig, path)


def field_figure(phi, U, T, dx, path, u_mag=None):
    fields = [("order parameter", phi, "RdBu_r"),
              ("supersaturation", U, "viridis"),
              ("temperature [K]", T, "inferno")]
    if u_mag is not None:
        fields.append(("|u| [lattice]", u_mag, "magma"))
    n = len(fields)
    fig, axes = plt.subplots(1, n, figsize=(4 * n, 3.6))
    extent = [0, phi.shape[0] * dx, 0, phi.shape[1] * dx]
    for ax, (label, data, cmap) in zip(np.atleast_1d(axes), fields):
        im = ax.imshow(data.T, origin="lower", cmap=cmap, extent=extent)
        ax.contour(np.linspace(extent[0], extent[1], phi.shape[0]),
                   np.linspace(extent[2], extent[3], phi.shape[1]),
                   phi.T, levels=[0.0], colors="w", linewidths=0.8)
        ax.set_title(label, fontsize=9)
        ax.set_xlabel("x [mm]")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    return _save(fig, path)


def centerline_figure(xs, profiles, path, ylabel="temperature [K]"):
    """profiles: list of (label, 1D array)."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for label, prof in profiles:
        ax.plot(xs, prof, label=label)
    ax.set_xlabel("x [mm]")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("Centerline profile")
    return _save(fig, path)


def history_figure(series, path, ylabel, title):
    """series: list of (label, times, values)."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for label, ts, vals in series:
        ax.plot(ts, vals, label=label)
    ax.set_xlabel("time [s]")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False, fontsize=8)
    ax.set_title(title)
    return _save(fig, path)


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
