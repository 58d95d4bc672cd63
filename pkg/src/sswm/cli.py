"""Command-line driver: ``sswm spectra|correlations|compare-pcr``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import correlations as corr
from .compare import compare_pcr
from .errors import ConfigError, OverdampedError, SSWMError
from .export import (R3_CROP, Manifest, run_header, write_json, write_r2, write_r3, write_rows,
                     write_spectrum)
from .grid import FrequencyGrid2D
from .params import PRESET_NAMES, load_config, load_preset
from .spectra import QUANTITIES, auto_grid, evaluate, find_peaks, predicted_resonances

log = logging.getLogger("sswm")


def _pair(text: str, cast, what: str) -> tuple:
    parts = text.lower().replace(",", "x").split("x")
    try:
        vals = [cast(p) for p in parts if p.strip()]
    except ValueError:
        raise ConfigError(f"bad {what} {text!r}; expected AxB") from None
    if len(vals) == 1:
        vals *= 2
    if len(vals) != 2:
        raise ConfigError(f"bad {what} {text!r}; expected AxB")
    return tuple(vals)


def resolve_run(args) -> tuple:
    """(params, grid, preset name) from --preset/--config and the override flags."""
    if args.config:
        params, grid, preset = load_config(args.config, default_preset=args.preset)
    elif args.preset:
        p = load_preset(args.preset)
        params, grid, preset = p.params, p.grid, p.name
    else:
        raise ConfigError("give --preset or --config")
    if args.halve_absorption:
        params = params.replace(halve_absorption=True)
    if args.literal_omega_tr:
        params = params.replace(literal_omega_tr=True)
    if grid is None:
        grid = auto_grid(params)
    if args.span:
        s1, s2 = _pair(args.span, float, "span")
        grid = FrequencyGrid2D(grid.nu1_center, s1, grid.n1, grid.nu2_center, s2, grid.n2)
    if args.grid:
        n1, n2 = _pair(args.grid, int, "grid")
        grid = FrequencyGrid2D(grid.nu1_center, grid.nu1_span, n1, grid.nu2_center, grid.nu2_span, n2)
    return params, grid, preset


def cmd_spectra(args, manifest: Manifest) -> None:
    params, grid, preset = resolve_run(args)
    field = evaluate(args.quantity, params, grid)
    header = run_header(field.params, grid, preset)
    manifest.update(**header, quantity=args.quantity)
    stem = f"spectrum_{args.quantity}"
    manifest.add(write_spectrum(manifest.path(stem + ".csv"), grid, field.values), "spectrum")
    manifest.add(write_json(manifest.path(stem + ".json"), {**header, "quantity": args.quantity}),
                 "sidecar")
    if not args.peaks:
        return
    peaks = find_peaks(field, args.threshold)
    try:
        pred = predicted_resonances(params)
        sites = pred.pathways
    except OverdampedError:
        pred, sites = None, ()
    rows = []
    for rank, pk in enumerate(peaks, 1):
        match = (None, None, None, None)
        if sites:
            dist = [np.hypot(pk.nu1 - a, pk.nu2 - b) for a, b, _ in sites]
            k = int(np.argmin(dist))
            match = (k + 1, sites[k][0], sites[k][1], dist[k])
        rows.append((rank, pk.nu1, pk.nu2, pk.magnitude) + match)
    manifest.add(write_rows(manifest.path("peaks.csv"),
                            ["rank", "nu1", "nu2", "magnitude", "pathway", "pred_nu1", "pred_nu2",
                             "distance"], rows), "peaks")
    pred_rows = [(k + 1, a, b, c) for k, (a, b, c) in enumerate(sites)]
    manifest.add(write_rows(manifest.path("predictions.csv"), ["pathway", "nu1", "nu2", "nu3"],
                            pred_rows), "predictions")
    manifest.update(n_peaks=len(peaks), threshold=args.threshold,
                    resonances=None if pred is None else {
                        "omega_e1": pred.omega_e1, "omega_e2": pred.omega_e2,
                        "gamma_e1": pred.gamma_e1, "gamma_e2": pred.gamma_e2})


def cmd_correlations(args, manifest: Manifest) -> None:
    params, grid, preset = resolve_run(args)
    field = corr.kernel_field(params, grid)
    amp = corr.amplitude_a3(field)
    surface = corr.surface_from_amplitude(amp)
    traces = [corr.conditional_from_kernel(field, tag) for tag in ("s1", "s2")]
    report = corr.classify_regime(params)
    diag = corr.diagonal_support_metric(surface)

    header = run_header(field.params, grid, preset)
    manifest.update(**header, regime=report.to_dict())
    manifest.add(write_r3(manifest.path("r3.csv"), surface.tau31_axis, surface.tau32_axis, surface.r3),
                 "r3")
    summary = {**header, "regime": report.to_dict(), "diagonal": diag.to_dict(),
               "kernel_edge_ratio": amp.edge_ratio, "r3_normalization": surface.normalization,
               "r3_crop": R3_CROP,
               "traces": {}}
    for tr in traces:
        manifest.add(write_r2(manifest.path(f"r2_{tr.traced_over}.csv"), tr.tau_axis, tr.r2,
                              tr.traced_over), "r2")
        info = {"normalization": tr.normalization, "coherence_extent": corr.coherence_extent(tr)}
        try:
            info["oscillation_period"] = corr.oscillation_period(tr)
        except SSWMError:
            info["oscillation_period"] = None
        summary["traces"][tr.traced_over] = info
    if args.oracle:
        rows = corr.oracle_table(field.params, grid, args.oracle, seed=args.seed, amplitude=amp)
        manifest.add(write_rows(manifest.path("oracle.csv"),
                                ["tau31", "tau32", "transform_re", "transform_im",
                                 "quadrature_re", "quadrature_im", "rel_dev"],
                                [(r.tau31, r.tau32, r.transform.real, r.transform.imag,
                                  r.quadrature.real, r.quadrature.imag, r.rel_dev) for r in rows]),
                     "oracle")
        summary["oracle_max_rel_dev"] = max(r.rel_dev for r in rows)
        manifest.update(oracle_max_rel_dev=summary["oracle_max_rel_dev"])
    manifest.add(write_json(manifest.path("regime.json"), summary), "regime")


def cmd_compare_pcr(args, manifest: Manifest) -> None:
    params, grid, preset = resolve_run(args)
    result = compare_pcr(params, grid)
    header = run_header(params, grid, preset)
    manifest.update(**header)
    manifest.add(write_rows(manifest.path("pcr_report.csv"), ["a", "b", "metric", "value"],
                            result.rows()), "report")
    manifest.add(write_json(manifest.path("pcr_report.json"), {
        **header,
        "chi_s3_max_rel_dev": result.chi_s3_max_rel_dev,
        "shape_distances": {f"{a}|{b}": d for (a, b), d in result.shape_distances.items()},
    }), "report")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=PRESET_NAMES, help="named parameter set")
    common.add_argument("--config", help="TOML config file (overrides the preset)")
    common.add_argument("--grid", help="samples per axis, e.g. 1024x1024 (powers of two)")
    common.add_argument("--span", help="detuning spans in gamma_31 units, e.g. 80x120")
    common.add_argument("--out", default="sswm-out", help="output directory (default: sswm-out)")
    common.add_argument("--halve-absorption", action="store_true",
                        help="use half the s3 absorption in the phase mismatch")
    common.add_argument("--literal-omega-tr", action="store_true",
                        help="transparency window |Omega_c2|/sqrt(8 OD) instead of |Omega_c2|^2/(gamma_31 sqrt(8 OD))")

    parser = argparse.ArgumentParser(prog="sswm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectra", parents=[common], help="susceptibility or kernel surface")
    sp.add_argument("--quantity", required=True, choices=QUANTITIES)
    sp.add_argument("--peaks", action="store_true", help="also write detected and predicted peaks")
    sp.add_argument("--threshold", type=float, default=0.5, help="peak threshold relative to max")
    sp.set_defaults(func=cmd_spectra)

    cp = sub.add_parser("correlations", parents=[common], help="R3 surface, R2 traces, regime")
    cp.add_argument("--oracle", type=int, default=0, metavar="K",
                    help="compare transform and quadrature at K probe points")
    cp.add_argument("--seed", type=int, default=0, help="probe selection seed")
    cp.set_defaults(func=cmd_correlations)

    pp = sub.add_parser("compare-pcr", parents=[common], help="HE vs PCR report")
    pp.set_defaults(func=cmd_compare_pcr)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    start = time.perf_counter()
    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        manifest = Manifest(out, args.command, __version__)
        args.func(args, manifest)
        manifest.write(time.perf_counter() - start)
    except SSWMError as exc:
        print(f"sswm: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
