"""Command-line front end.

Six subcommands: partition, counts, kernel, correlate, sample, verify.
Output is a sequence of named tables, CSV by default (each table opens
with a `# table <name>` line and ends with a blank line) or JSON lines
with --format json (one object per row, tagged with its table name).
Complex values are split into _re/_im columns.  Floats are printed with
repr, so a fixed seed gives byte-identical output.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np
from scipy import stats

from . import checks, ensemble, kernels, oracle, pfaffian, sampler

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------- output


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _emit(tables, fmt: str, stream) -> None:
    """tables: iterable of (name, columns, rows); rows are dicts."""
    if fmt == "json":
        for name, columns, rows in tables:
            for row in rows:
                obj = {"table": name}
                for c in columns:
                    obj[c] = _jsonable(row.get(c))
                stream.write(json.dumps(obj) + "\n")
        return
    first = True
    for name, columns, rows in tables:
        if not first:
            stream.write("\n")
        first = False
        stream.write(f"# table {name}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])


# ---------------------------------------------------------------- parsing


def _parse_floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(p) for p in text.split(","))


def _parse_grid(text: str) -> np.ndarray:
    """Either `start:stop:count` or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be positive")
        return np.linspace(start, stop, count)
    return np.asarray(_parse_floats(text), dtype=np.float64)


def _resolve_fugacity(args) -> float:
    """Fugacity from --fugacity/--x directly or --r as rate * total charge."""
    x = getattr(args, "fugacity", None)
    r = getattr(args, "r", None)
    if x is not None and r is not None:
        raise ValueError("give either a fugacity or a rate, not both")
    if x is not None:
        return float(x)
    if r is not None:
        if args.n is None:
            raise ValueError("--r needs --n to fix the fugacity")
        return float(r) * args.n
    raise ValueError("a fugacity (--fugacity/--x) or a rate (--r) is required")


# ------------------------------------------------------------ subcommands


def _cmd_partition(args, out) -> int:
    x = _resolve_fugacity(args)
    params = ensemble.EnsembleParams(args.n, x)
    lz = ensemble.log_partition(params)
    rows = [
        {
            "n": args.n,
            "fugacity": x,
            "log_partition": lz,
            "partition": ensemble.partition(params),
            "empty": lz == -math.inf,
        }
    ]
    _emit(
        [("partition", ["n", "fugacity", "log_partition", "partition", "empty"], rows)],
        args.format,
        out,
    )
    return 0


def _cmd_counts(args, out) -> int:
    x = _resolve_fugacity(args)
    n = args.n
    params = ensemble.EnsembleParams(n, x)
    dist = ensemble.count_distribution(params)
    tables = []

    prob_rows = []
    for i, q in enumerate(dist.success_probs):
        prob_rows.append({"index": i + 1, "scale": n - 1 - 2 * i, "success_prob": q})
    tables.append(("count-success-probs", ["index", "scale", "success_prob"], prob_rows))

    moment_rows = [
        {
            "n": n,
            "fugacity": x,
            "parity": dist.parity,
            "mean": dist.mean(),
            "variance": dist.variance(),
            "mean_fraction": dist.mean() / n,
            "var_fraction": dist.variance() / n,
        }
    ]
    tables.append(
        (
            "count-moments",
            ["n", "fugacity", "parity", "mean", "variance", "mean_fraction", "var_fraction"],
            moment_rows,
        )
    )

    if x > 0.0:
        rate = x / n
        tables.append(
            (
                "count-limits",
                ["rate", "limit_mean_fraction", "limit_var_fraction"],
                [
                    {
                        "rate": rate,
                        "limit_mean_fraction": ensemble.limiting_mean_fraction(rate),
                        "limit_var_fraction": ensemble.limiting_var_fraction(rate),
                    }
                ],
            )
        )

    pmf_rows = []
    pmf = dist.pmf()
    for count, p in zip(dist.support(), pmf):
        pmf_rows.append({"count": count, "probability": p})
    tables.append(("count-pmf", ["count", "probability"], pmf_rows))

    if args.samples > 0:
        counts = ensemble.sample_counts(params, args.samples, rng=args.seed)
        columns = ["index", "count"]
        z = None
        if x > 0.0:
            z = ensemble.standardize_counts(counts, n, x / n)
            columns.append("standardized")
        rows = []
        for i, c in enumerate(counts):
            row = {"index": i, "count": int(c)}
            if z is not None:
                row["standardized"] = z[i]
            rows.append(row)
        tables.append(("count-samples", columns, rows))

        summary = {
            "samples": args.samples,
            "sample_mean": float(np.mean(counts)),
            "sample_var": float(np.var(counts, ddof=1)) if args.samples > 1 else 0.0,
        }
        cols = ["samples", "sample_mean", "sample_var"]
        if z is not None and args.samples > 1:
            ks = stats.kstest(z, "norm")
            summary["ks_statistic"] = float(ks.statistic)
            summary["ks_pvalue"] = float(ks.pvalue)
            cols += ["ks_statistic", "ks_pvalue"]
        tables.append(("count-sample-summary", cols, [summary]))

    _emit(tables, args.format, out)
    return 0


_SPECIES = {"11": (1, 1), "22": (2, 2), "12": (1, 2), "21": (2, 1)}


def _cmd_kernel(args, out) -> int:
    species = _SPECIES[args.species]
    kind = args.entry
    deltas = _parse_grid(args.deltas)
    gauge_name = args.gauge

    in_spacings = gauge_name in ("scaled", "coe", "cse") or (
        args.r is not None and args.fugacity is None
    )

    if gauge_name in ("raw", "rescaled"):
        if args.n is None:
            raise ValueError(f"gauge {gauge_name} needs --n")
        x = _resolve_fugacity(args)
        if gauge_name == "raw":
            gauge = kernels.KernelGauge.raw(args.n, x)
        else:
            rate = args.r if args.r is not None else x / args.n
            gauge = kernels.KernelGauge.rescaled(args.n, x, rate)
    elif gauge_name == "scaled":
        if args.r is None:
            raise ValueError("gauge scaled needs --r")
        gauge = kernels.KernelGauge.scaled(args.r)
    elif gauge_name == "coe":
        gauge = kernels.KernelGauge.coe()
    else:
        gauge = kernels.KernelGauge.cse()

    compare = gauge_name == "rescaled" and args.r is not None
    columns = ["delta", "angle", "value_re", "value_im"]
    if compare:
        columns += ["normalized_re", "normalized_im", "limit_re", "limit_im", "abs_gap"]

    rows = []
    for d in deltas:
        d = float(d)
        angle = TWO_PI * d / args.n if (in_spacings and args.n is not None) else d
        val = kernels.entry(gauge, species, kind, angle, 0.0)
        row = {
            "delta": d,
            "angle": angle,
            "value_re": val.real,
            "value_im": val.imag,
        }
        if compare:
            norm = (TWO_PI / args.n) * val
            lim = kernels.scaled_entry(
                kernels.ScaledKernelQuery(args.r, species, kind, d, 0.0)
            )
            row["normalized_re"] = norm.real
            row["normalized_im"] = norm.imag
            row["limit_re"] = lim.real
            row["limit_im"] = lim.imag
            row["abs_gap"] = abs(norm - lim)
        rows.append(row)

    _emit([("kernel", columns, rows)], args.format, out)
    return 0


def _cmd_correlate(args, out) -> int:
    charge1 = _parse_floats(args.x_angles)
    charge2 = _parse_floats(args.z_angles)
    if not charge1 and not charge2:
        raise ValueError("at least one angle is required")

    if args.scaled:
        if args.r is None:
            raise ValueError("--scaled needs --r")
        gauge = kernels.KernelGauge.scaled(args.r)
        label = "scaled"
    else:
        if args.n is None:
            raise ValueError("--n is required unless --scaled is given")
        x = _resolve_fugacity(args)
        gauge = kernels.KernelGauge.raw(args.n, x)
        label = "raw"

    query = pfaffian.CorrelationQuery(charge1, charge2)
    value = pfaffian.intensity(gauge, query)
    row = {
        "gauge": label,
        "charge1_points": len(charge1),
        "charge2_points": len(charge2),
        "intensity": value,
    }
    columns = ["gauge", "charge1_points", "charge2_points", "intensity"]
    if args.shift is not None:
        shifted = pfaffian.CorrelationQuery(
            tuple(t + args.shift for t in charge1),
            tuple(t + args.shift for t in charge2),
        )
        row["shifted_intensity"] = pfaffian.intensity(gauge, shifted)
        row["shift_gap"] = abs(row["shifted_intensity"] - value)
        columns += ["shifted_intensity", "shift_gap"]

    _emit([("intensity", columns, [row])], args.format, out)
    return 0


def _cmd_sample(args, out) -> int:
    x = _resolve_fugacity(args)
    config = sampler.ChainConfig(
        total_charge=args.n,
        fugacity=x,
        steps=args.steps,
        burn_in=args.burn_in,
        thin=args.thin,
        seed=args.seed,
        density_bins=args.density_bins,
        pair_bins=args.pair_bins,
        spacing_bins=args.spacing_bins,
        spacing_max=args.spacing_max,
    )
    results = sampler.run_chains(config, args.chains)
    for r in results:
        sampler.validate_energy(r)
    merged = sampler.merge_accumulators(results)
    rates = sampler.acceptance_rates(results)
    tables = []

    chain_rows = []
    for i, r in enumerate(results):
        chain_rows.append(
            {
                "chain": i,
                "seed": r.config.seed,
                "backend": r.backend,
                "recorded": r.accumulators.recorded,
                "final_energy": r.final_energy,
                "max_energy_drift": r.max_energy_drift,
            }
        )
    tables.append(
        (
            "chain-summary",
            ["chain", "seed", "backend", "recorded", "final_energy", "max_energy_drift"],
            chain_rows,
        )
    )

    tables.append(
        (
            "acceptance",
            ["move", "proposed", "accepted", "rate"],
            [
                {
                    "move": name,
                    "proposed": int(merged.proposed[i]),
                    "accepted": int(merged.accepted[i]),
                    "rate": rates[name],
                }
                for i, name in enumerate(("rotate", "split", "merge"))
            ],
        )
    )

    params = ensemble.EnsembleParams(args.n, x)
    dist = ensemble.count_distribution(params)
    pmf = dict(zip(dist.support(), dist.pmf()))
    count_rows = []
    for count in range(args.n + 1):
        observed = merged.count_hist[count] / merged.recorded
        if args.chains >= 2:
            _, se = sampler.estimate_count_prob(results, count)
        else:
            se = math.nan
        count_rows.append(
            {
                "count": count,
                "observed": float(observed),
                "error": float(se),
                "exact": float(pmf.get(count, 0.0)),
            }
        )
    tables.append(("count-histogram", ["count", "observed", "error", "exact"], count_rows))

    mean1 = ensemble.mean_count(params)
    exact_density = {1: mean1 / TWO_PI, 2: (args.n - mean1) / 2.0 / TWO_PI}
    density_rows = []
    edges = np.linspace(-math.pi, math.pi, args.density_bins + 1)
    width = TWO_PI / args.density_bins
    for species in (1, 2):
        hist = merged.density1 if species == 1 else merged.density2
        for b in range(args.density_bins):
            density_rows.append(
                {
                    "species": species,
                    "center": float(0.5 * (edges[b] + edges[b + 1])),
                    "estimate": float(hist[b] / (merged.recorded * width)),
                    "exact": exact_density[species],
                }
            )
    tables.append(("density", ["species", "center", "estimate", "exact"], density_rows))

    gauge = kernels.KernelGauge.raw(args.n, x)
    pair_rows = []
    for species in ((1, 1), (2, 2), (1, 2)):
        est = sampler.estimate_pair_intensity(results, species)
        for c, v, e in zip(est.centers, est.values, est.errors):
            c = float(c)
            if species == (1, 1):
                q = pfaffian.CorrelationQuery((c, 0.0), ())
            elif species == (2, 2):
                q = pfaffian.CorrelationQuery((), (c, 0.0))
            else:
                q = pfaffian.CorrelationQuery((c,), (0.0,))
            pair_rows.append(
                {
                    "species": f"{species[0]}{species[1]}",
                    "center": c,
                    "estimate": float(v),
                    "error": float(e),
                    "exact": pfaffian.intensity(gauge, q),
                }
            )
    tables.append(
        ("pair-intensity", ["species", "center", "estimate", "error", "exact"], pair_rows)
    )

    spacing_rows = []
    for which in ("charge1", "charge2", "all"):
        table = sampler.spacing_table(results, which)
        for b in range(table.counts.size):
            spacing_rows.append(
                {
                    "which": which,
                    "lo": float(table.edges[b]),
                    "hi": float(table.edges[b + 1]),
                    "count": int(table.counts[b]),
                }
            )
        spacing_rows.append(
            {"which": which, "lo": float(table.edges[-1]), "hi": math.inf,
             "count": table.overflow}
        )
    tables.append(("spacing", ["which", "lo", "hi", "count"], spacing_rows))

    _emit(tables, args.format, out)
    return 0


def _cmd_verify(args, out) -> int:
    results = checks.run_checks(args.level)
    rows = [
        {
            "check": r.check,
            "passed": r.passed,
            "measured": r.measured,
            "bound": r.bound,
            "seconds": round(r.seconds, 3),
            "detail": r.detail,
        }
        for r in results
    ]
    _emit(
        [("verify", ["check", "passed", "measured", "bound", "seconds", "detail"], rows)],
        args.format,
        out,
    )
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twocharge",
        description="Exact laws, Pfaffian kernels, and sampling for the "
        "two-charge circular ensemble.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    p = add("partition", "partition function at a coupling")
    p.add_argument("--n", type=int, required=True, help="total charge")
    p.add_argument("--fugacity", type=float, help="charge-1 fugacity X")
    p.add_argument("--r", type=float, help="rate r, meaning X = n*r")
    p.set_defaults(func=_cmd_partition)

    p = add("counts", "charge-1 count law: Bernoulli scales, moments, pmf")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fugacity", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--samples", type=int, default=0, help="draw exact count samples")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_counts)

    p = add("kernel", "matrix-kernel entries on a separation grid")
    p.add_argument("--species", choices=sorted(_SPECIES), required=True)
    p.add_argument("--entry", choices=("S", "DS", "IS"), required=True)
    p.add_argument("--gauge", choices=kernels.GAUGES, default="scaled")
    p.add_argument("--n", type=int, help="total charge (raw/rescaled gauges)")
    p.add_argument("--fugacity", "--x", dest="fugacity", type=float)
    p.add_argument("--r", type=float, help="rate; separations switch to mean spacings")
    p.add_argument(
        "--deltas",
        default="0:3:31",
        help="separation grid, start:stop:count or comma list",
    )
    p.set_defaults(func=_cmd_kernel)

    p = add("correlate", "correlation intensity at explicit angles")
    p.add_argument("--n", type=int)
    p.add_argument("--x", dest="fugacity", type=float)
    p.add_argument("--x-angles", default="", help="charge-1 angles, comma separated")
    p.add_argument("--z-angles", default="", help="charge-2 angles, comma separated")
    p.add_argument("--scaled", action="store_true", help="use the bulk scaling limit")
    p.add_argument("--r", type=float)
    p.add_argument("--shift", type=float, help="also evaluate all angles shifted")
    p.set_defaults(func=_cmd_correlate)

    p = add("sample", "run Metropolis chains and compare with exact laws")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fugacity", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--thin", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--chains", type=int, default=2)
    p.add_argument("--density-bins", type=int, default=32)
    p.add_argument("--pair-bins", type=int, default=36)
    p.add_argument("--spacing-bins", type=int, default=40)
    p.add_argument("--spacing-max", type=float, default=4.0)
    p.set_defaults(func=_cmd_sample)

    p = add("verify", "run the self-verification suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args, sys.stdout)
    except (ValueError, ArithmeticError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
