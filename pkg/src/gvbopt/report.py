"""Study drivers: gain tables, profile charts, structural checks.

These functions take a parsed scenario and produce the artifacts a design
study needs: a table of volume gains per model and slug count (CSV plus an
aligned text table), profile charts with the limiting curve overlaid, and a
report on the structural conditions behind the refinement guarantee.
"""

import os
from dataclasses import dataclass

import numpy as np

from .fluids import GeneralizedKoval, validate_conditions
from .optimizer import limiting_profile, optimize, two_slug_scan
from .schedule import profile_of, single_slug_volume
from .svgplot import PALETTE, Curve, Panel, render_svg


def file_slug(label):
    """Model label as a filename fragment."""
    return label.replace(":", "-").replace("/", "-")


@dataclass(frozen=True)
class GainTable:
    """Volume gains (fractions of the single-slug volume) per model and n,
    plus the limiting gain per model."""

    model_labels: tuple
    slug_counts: tuple
    gains: dict
    limits: dict
    converged: dict

    @property
    def all_converged(self):
        return all(self.converged.values())

    def to_csv_text(self):
        lines = ["model,n,gain"]
        for label in self.model_labels:
            for n in self.slug_counts:
                lines.append(f"{label},{n},{self.gains[label, n]:.12g}")
            lines.append(f"{label},limit,{self.limits[label]:.12g}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        header = ["model"] + [f"n={n}" for n in self.slug_counts] + ["limit"]
        rows = [header]
        for label in self.model_labels:
            row = [label]
            for n in self.slug_counts:
                mark = "" if self.converged[label, n] else "*"
                row.append(f"{100.0 * self.gains[label, n]:.2f}{mark}")
            row.append(f"{100.0 * self.limits[label]:.2f}")
            rows.append(row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        out = []
        for r in rows:
            out.append(
                "  ".join(
                    cell.ljust(w) if i == 0 else cell.rjust(w)
                    for i, (cell, w) in enumerate(zip(r, widths))
                )
            )
        text = "\n".join(out) + "\n"
        if not self.all_converged:
            text += "(* best starts disagree; treat the value as approximate)\n"
        return text


def run_table(scenario, out_dir=None):
    """Optimize every (model, n) cell of the scenario and tabulate gains.

    A cell whose starts disagree is recorded and marked, never raised.
    Returns the table and the per-cell optimization results; when
    ``out_dir`` is given, writes gains.csv and one result JSON per cell.
    """
    gains, limits, converged, results = {}, {}, {}, {}
    for fingering in scenario.models:
        label = fingering.label
        for n in scenario.slug_counts:
            res = optimize(fingering, scenario.viscosity, n, scenario.optimizer)
            results[label, n] = res
            gains[label, n] = res.gain
            converged[label, n] = res.converged
        limits[label] = limiting_profile(fingering, scenario.viscosity).limiting_gain

    table = GainTable(
        model_labels=scenario.model_labels,
        slug_counts=scenario.slug_counts,
        gains=gains,
        limits=limits,
        converged=converged,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "gains.csv"), "w") as fh:
            fh.write(table.to_csv_text())
        for (label, n), res in results.items():
            res.save(os.path.join(out_dir, f"result_{file_slug(label)}_{n}.json"))
    return table, results


def render_profiles(scenario, results, out_dir):
    """Write profile charts (SVG) and sampled profile tables (CSV).

    One chart panel per model, curves for each slug count plus the dashed
    limiting profile.  The CSV holds 1001 uniformly spaced concentrations
    with one switch-time column per slug count and a final limiting column;
    with several models each model gets its own file.
    """
    os.makedirs(out_dir, exist_ok=True)
    model = scenario.viscosity
    grid = np.linspace(model.c_min, model.c_max, 1001)
    panels = []
    multi = len(scenario.models) > 1
    written = []
    for fingering in scenario.models:
        label = fingering.label
        limit = limiting_profile(fingering, model)
        panel = Panel(
            title=f"optimal injection profiles ({label})",
            xlim=(model.c_min, model.c_max),
            ylim=(0.0, 1.02),
        )
        columns = []
        for i, n in enumerate(scenario.slug_counts):
            res = results[label, n]
            prof = profile_of(res.configuration)
            panel.curves.append(
                Curve(
                    label=f"n={n}",
                    points=prof.staircase(),
                    color=PALETTE[i % len(PALETTE)],
                )
            )
            columns.append((f"T_n{n}", prof(grid)))
        limit_vals = limit.profile(grid)
        panel.curves.append(
            Curve(
                label="limit",
                points=list(zip(grid.tolist(), limit_vals.tolist())),
                color="#000000",
                dashed=True,
            )
        )
        columns.append(("T_inf", limit_vals))
        panels.append(panel)

        name = f"profiles_{file_slug(label)}.csv" if multi else "profiles.csv"
        csv_path = os.path.join(out_dir, name)
        with open(csv_path, "w") as fh:
            fh.write("c," + ",".join(h for h, _ in columns) + "\n")
            for row in range(grid.size):
                vals = ",".join(f"{vals[row]:.12g}" for _, vals in columns)
                fh.write(f"{grid[row]:.12g},{vals}\n")
        written.append(csv_path)

    svg_path = os.path.join(out_dir, "profiles.svg")
    render_svg(panels, svg_path)
    return svg_path, written


def check_models(scenario, grid_size=128):
    """Validate the structural conditions for each generalized Koval model
    in the scenario and report whether slug refinement can help.

    When the convexity condition fails, the refinement guarantee is void, so
    the report also scans every two-slug split for an actual improvement
    over the single slug.  Returns (text, all_conditions_ok).
    """
    model = scenario.viscosity
    lines = []
    all_ok = True
    for fingering in scenario.models:
        label = fingering.label
        if not isinstance(fingering, GeneralizedKoval):
            lines.append(f"{label}: mean-mobility model, conditions hold by design")
            continue
        report = validate_conditions(fingering.flux, model, grid_size=grid_size)
        lines.append(f"{label}:")
        for check in report:
            lines.append("  " + _check_line(check))
        if not report.all_satisfied:
            all_ok = False
            v1 = single_slug_volume(fingering, model)
            _, vols = two_slug_scan(fingering, model)
            best = float(np.min(vols))
            if best < v1:
                lines.append(
                    f"  refinement still helps here: a two-slug split reaches "
                    f"volume {best:.6f} < {v1:.6f}"
                )
            else:
                lines.append(
                    f"  warning: no two-slug split beats the single slug "
                    f"(best {best:.6f} >= {v1:.6f}); refinement may not converge"
                )
    return "\n".join(lines) + "\n", all_ok


def _check_line(check):
    status = "ok" if check.satisfied else "VIOLATED"
    line = f"({check.name}) {status}  worst violation {check.worst_violation:.3e}"
    if not check.satisfied and check.witness:
        pts = ", ".join(f"{v:.4f}" for v in check.witness)
        line += f"  at ({pts})"
    return line
