"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 numeric/domain error,
3 threshold search did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, reproduce
from .ann import LMConfig, evaluate_metrics, load_model, predict, save_model, train_mlp, train_rbf
from .ber_model import FormulaVariant, OrderStatSize, closed_form_ber
from .dataset import DEFAULT_TEST_SPEC, DEFAULT_TRAIN_SPEC, generate_grid, read_csv, write_csv
from .link_model import Scenario
from .optimizer import SearchConfig, ThresholdSearchError, optimal_threshold, threshold_sweep
from .simulator import default_validation_pairs, simulate_ber, validate_closed_form, validate_pairs

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- arguments


def _add_scenario(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma-sr2", type=float, required=True, help="source-relay channel variance (linear)")
    p.add_argument("--sigma-rd2", type=float, required=True, help="relay-destination channel variance (linear)")
    p.add_argument("--sigma-sd2", type=float, required=True, help="source-destination channel variance (linear)")
    p.add_argument("--m", type=int, required=True, help="number of relays")
    p.add_argument("--ebn0-db", type=float, required=True, help="Eb/N0 in dB")


def _add_variant(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-binomial", action="store_true", help="drop C(M,i) from the decoding-set weights")
    p.add_argument(
        "--order-stat",
        choices=[o.value for o in OrderStatSize],
        default=OrderStatSize.DECODING_SET_SIZE.value,
        help="number of relays the best relay is chosen from in the MRC term",
    )


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma-max", type=float, default=20.0)
    p.add_argument("--n-grid", type=int, default=400)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--gamma-cap", type=float, default=160.0)


def _add_out(p: argparse.ArgumentParser, formats=("csv", "json", "table")) -> None:
    p.add_argument("--out", type=Path, help="write the result here (a manifest is written beside it)")
    p.add_argument("--format", choices=formats, default=formats[0])


def _add_workers(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dfthreshold", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ber", help="closed-form BER at one threshold")
    _add_scenario(p)
    p.add_argument("--gamma-th", type=float, required=True)
    _add_variant(p)
    _add_out(p, ("table", "json", "csv"))

    p = sub.add_parser("sweep", help="BER against threshold")
    _add_scenario(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma-th", type=float, nargs="+")
    g.add_argument("--grid", help="START:STOP:NUM, uniformly spaced")
    _add_variant(p)
    _add_out(p)

    p = sub.add_parser("opt", help="BER-minimizing threshold")
    _add_scenario(p)
    _add_variant(p)
    _add_search(p)
    _add_out(p, ("table", "json", "csv"))

    p = sub.add_parser("simulate", help="Monte Carlo BER estimate")
    _add_scenario(p)
    p.add_argument("--gamma-th", type=float, required=True)
    p.add_argument("--n-bits", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    _add_workers(p)
    _add_out(p, ("table", "json", "csv"))

    p = sub.add_parser("validate", help="closed form against Monte Carlo")
    p.add_argument("--sigma-sr2", type=float)
    p.add_argument("--sigma-rd2", type=float)
    p.add_argument("--sigma-sd2", type=float)
    p.add_argument("--m", type=int, nargs="+")
    p.add_argument("--ebn0-db", type=float, nargs="+")
    p.add_argument("--gamma-th", type=float, nargs="+", help="omit all scenario flags to use the default 12 pairs")
    p.add_argument("--n-bits", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allowance", type=float, default=0.10, help="relative model-mismatch allowance")
    _add_workers(p)
    _add_out(p, ("table", "json"))

    p = sub.add_parser("gen-dataset", help="labeled scenario grid as CSV")
    p.add_argument("--split", choices=["train", "test"], default="train")
    _add_variant(p)
    _add_search(p)
    _add_workers(p)
    _add_out(p, ("csv",))

    p = sub.add_parser("train", help="train a predictor")
    p.add_argument("kind", choices=["mlp", "rbf"])
    p.add_argument("--train", type=Path, required=True, help="training CSV")
    p.add_argument("--hidden", type=int, default=12, help="hidden neurons / RBF centers")
    p.add_argument("--spread", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--trace", type=Path, help="LM trace CSV (mlp only)")
    p.add_argument("--out", type=Path, required=True, help="model JSON")

    p = sub.add_parser("predict", help="predict the optimal threshold")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--features", type=float, nargs=5, metavar=("SR2", "RD2", "SD2", "M", "EBN0_DB"), required=True)

    p = sub.add_parser("evaluate", help="model metrics on a labeled CSV")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    _add_out(p, ("json", "table"))

    p = sub.add_parser("reproduce", help="regenerate a published table or figure")
    p.add_argument("target", choices=["table1", "table2", "table3", "fig2", "fig3", "fig5", "fig6"])
    p.add_argument("--train", type=Path, help="reuse a training CSV instead of generating one")
    p.add_argument("--test", type=Path, help="reuse a test CSV")
    p.add_argument("--mlp-model", type=Path)
    p.add_argument("--rbf-model", type=Path)
    p.add_argument("--seed", type=int, default=0)
    _add_workers(p)
    _add_out(p, ("csv", "table", "json"))

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("manifest", type=Path)
    return parser


# ---------------------------------------------------------------- helpers


def _scenario(args) -> Scenario:
    checks = [("--sigma-sr2", args.sigma_sr2), ("--sigma-rd2", args.sigma_rd2), ("--sigma-sd2", args.sigma_sd2)]
    for flag, value in checks:
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{flag} must be a finite positive number, got {value}")
    if args.m < 1:
        raise DomainError(f"--m must be >= 1, got {args.m}")
    if not math.isfinite(args.ebn0_db):
        raise DomainError("--ebn0-db must be finite")
    return Scenario(args.sigma_sr2, args.sigma_rd2, args.sigma_sd2, args.m, args.ebn0_db)


def _variant(args) -> FormulaVariant:
    return FormulaVariant(not args.no_binomial, OrderStatSize(args.order_stat))


def _search(args) -> SearchConfig:
    try:
        return SearchConfig(args.gamma_max, args.n_grid, args.tol, args.gamma_cap)
    except ValueError as exc:
        raise DomainError(f"search settings (--gamma-max/--n-grid/--tol/--gamma-cap): {exc}") from None


def _threshold(value: float, flag: str = "--gamma-th") -> float:
    if not (math.isfinite(value) and value >= 0):
        raise DomainError(f"{flag} must be finite and >= 0, got {value}")
    return value


def _positive_int(value: int, flag: str, minimum: int = 1) -> int:
    if value < minimum:
        raise DomainError(f"{flag} must be >= {minimum}, got {value}")
    return value


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(_fmt(x) for x in v)
    return v


def _rows_to_table(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[_short(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return ",".join(_short(x) for x in v)
    return str(v)


def _render(rows: list[dict], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        payload = {"rows": rows, **(extra or {})}
        return json.dumps(payload, indent=2, default=_json_default) + "\n"
    if fmt == "table":
        text = _rows_to_table(rows)
        if extra:
            text += json.dumps(extra, indent=2, default=_json_default) + "\n"
        return text
    return _rows_to_csv(rows)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _manifest(argv: list[str], args, outputs: list[Path]) -> dict:
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    return {"command": args.command, "argv": argv, "config": config, "version": __version__, "outputs": [str(o) for o in outputs]}


def _emit(text: str, args, argv: list[str], extra_outputs: list[Path] = ()) -> None:
    out = getattr(args, "out", None)
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    outputs = [out, *extra_outputs]
    Path(str(out) + ".manifest.json").write_text(json.dumps(_manifest(argv, args, outputs), indent=2) + "\n")


# ---------------------------------------------------------------- commands


def cmd_ber(args, argv):
    s = _scenario(args)
    g = _threshold(args.gamma_th)
    v = _variant(args)
    ber = closed_form_ber(s, g, v)
    row = {"gamma_th": g, "ber": ber}
    if args.format == "table":
        _emit(f"{ber:.6e}\n", args, argv)
    else:
        _emit(_render([row], args.format, {"formula_variant": v.to_dict()} if args.format == "json" else None), args, argv)


def cmd_sweep(args, argv):
    s = _scenario(args)
    if args.grid:
        try:
            start, stop, num = args.grid.split(":")
            grid = np.linspace(float(start), float(stop), int(num))
        except ValueError:
            raise UsageError(f"--grid expects START:STOP:NUM, got {args.grid!r}") from None
    else:
        grid = np.array(args.gamma_th, dtype=float)
    for g in grid:
        _threshold(float(g), "--gamma-th/--grid")
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("threshold grid must be nonempty and strictly increasing")
    v = _variant(args)
    curve = threshold_sweep(s, grid, v)
    rows = [{"gamma_th": p.gamma_th, "ber": p.ber} for p in curve.points]
    _emit(_render(rows, args.format, {"formula_variant": v.to_dict()} if args.format == "json" else None), args, argv)


def cmd_opt(args, argv):
    s = _scenario(args)
    v = _variant(args)
    r = optimal_threshold(s, v, _search(args))
    if args.format == "table":
        _emit(f"gamma_th_opt {r.gamma_th_opt:.6f}\nber_min {r.ber_min:.6e}\n", args, argv)
    else:
        row = {"gamma_th_opt": r.gamma_th_opt, "ber_min": r.ber_min, "boundary": r.boundary}
        _emit(_render([row], args.format, {"formula_variant": v.to_dict()} if args.format == "json" else None), args, argv)


def cmd_simulate(args, argv):
    s = _scenario(args)
    g = _threshold(args.gamma_th)
    _positive_int(args.n_bits, "--n-bits", 10_000)
    _positive_int(args.workers, "--workers")
    e = simulate_ber(s, g, args.n_bits, args.seed, args.workers)
    if args.format == "table":
        _emit(f"ber {e.ber:.6e}\nci95 {e.ci95_halfwidth:.3e}\nerrors {e.n_errors}\nbits {e.n_bits}\n", args, argv)
    else:
        row = {"ber": e.ber, "ci95_halfwidth": e.ci95_halfwidth, "n_errors": e.n_errors, "n_bits": e.n_bits}
        _emit(_render([row], args.format, {"seed": args.seed, "workers": args.workers} if args.format == "json" else None), args, argv)


def cmd_validate(args, argv):
    _positive_int(args.n_bits, "--n-bits", 10_000)
    _positive_int(args.workers, "--workers")
    scenario_flags = (args.sigma_sr2, args.sigma_rd2, args.sigma_sd2, args.m, args.ebn0_db, args.gamma_th)
    if all(f is None for f in scenario_flags):
        report = validate_pairs(default_validation_pairs(), args.n_bits, args.seed, args.workers, model_allowance=args.allowance)
    elif any(f is None for f in scenario_flags):
        raise UsageError("validate needs all of --sigma-sr2 --sigma-rd2 --sigma-sd2 --m --ebn0-db --gamma-th, or none")
    else:
        scenarios = []
        for m in args.m:
            for db in args.ebn0_db:
                ns = argparse.Namespace(sigma_sr2=args.sigma_sr2, sigma_rd2=args.sigma_rd2, sigma_sd2=args.sigma_sd2, m=m, ebn0_db=db)
                scenarios.append(_scenario(ns))
        thresholds = [_threshold(g) for g in args.gamma_th]
        report = validate_closed_form(scenarios, thresholds, args.n_bits, args.seed, workers=args.workers, model_allowance=args.allowance)
    _emit(report.to_table() + "\n" if args.format == "table" else report.to_json() + "\n", args, argv)


def cmd_gen_dataset(args, argv):
    _positive_int(args.workers, "--workers")
    spec = DEFAULT_TRAIN_SPEC if args.split == "train" else DEFAULT_TEST_SPEC
    d = generate_grid(spec, _variant(args), _search(args), args.workers)
    if args.out is None:
        write_csv(d, sys.stdout)
        return
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(d, args.out)
    manifest = _manifest(argv, args, [args.out])
    manifest["dataset"] = {**d.meta, "n_samples": len(d), "n_boundary": int(d.boundary.sum())}
    Path(str(args.out) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _load_dataset(path: Path):
    try:
        return read_csv(path)
    except OSError as exc:
        raise UsageError(f"cannot read dataset {path}: {exc.strerror}") from None


def cmd_train(args, argv):
    train = _load_dataset(args.train)
    _positive_int(args.hidden, "--hidden")
    if args.kind == "mlp":
        cfg = LMConfig(max_iter=_positive_int(args.max_iter, "--max-iter", 0))
        model, trace = train_mlp(train, args.hidden, cfg, args.seed)
        training_config = {"n_hidden": args.hidden, **cfg.to_dict(), "stop_reason": trace.stop_reason, "final_mse": trace.mse[-1]}
        if args.trace:
            args.trace.write_text(trace.to_csv())
    else:
        if not args.spread > 0:
            raise DomainError(f"--spread must be positive, got {args.spread}")
        if args.hidden > len(train):
            raise DomainError(f"--hidden must not exceed the {len(train)} training samples")
        model = train_rbf(train, args.hidden, args.spread, args.seed)
        training_config = {"n_centers": args.hidden, "spread": args.spread, "ridge": 1e-8, "kmeans_iter": 50}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_model(args.out, model, seed=args.seed, training_config=training_config, formula_variant=_variant_of_csv(args.train))
    outputs = [args.out] + ([args.trace] if args.kind == "mlp" and args.trace else [])
    Path(str(args.out) + ".manifest.json").write_text(json.dumps(_manifest(argv, args, outputs), indent=2) + "\n")


def _variant_of_csv(path: Path):
    manifest = Path(str(path) + ".manifest.json")
    if manifest.exists():
        return json.loads(manifest.read_text()).get("dataset", {}).get("formula_variant")
    return None


def _load_model(path: Path):
    try:
        return load_model(path)
    except OSError as exc:
        raise UsageError(f"cannot read model {path}: {exc.strerror}") from None
    except (KeyError, ValueError) as exc:
        raise DomainError(f"invalid model file {path}: {exc}") from None


def cmd_predict(args, argv):
    model = _load_model(args.model)
    feats = np.array(args.features, dtype=float)
    if not np.all(np.isfinite(feats)):
        raise DomainError("--features must be finite")
    sys.stdout.write(f"{predict(model, feats):.6f}\n")


def cmd_evaluate(args, argv):
    model = _load_model(args.model)
    test = _load_dataset(args.test)
    m = evaluate_metrics(predict(model, test.features), test.targets)
    if args.format == "table":
        r2 = "n/a" if m.r2 is None else f"{m.r2:.6f}"
        _emit(f"mse {m.mse:.6e}\nmae {m.mae:.6e}\nr2 {r2}\n", args, argv)
    else:
        _emit(json.dumps(m.to_dict(), indent=2) + "\n", args, argv)


def _models_for(args):
    mlp = _load_model(args.mlp_model) if args.mlp_model else None
    rbf = _load_model(args.rbf_model) if args.rbf_model else None
    train = None
    if mlp is None or rbf is None:
        train = _load_dataset(args.train) if args.train else generate_grid(DEFAULT_TRAIN_SPEC, workers=args.workers)
        if mlp is None:
            mlp, _ = train_mlp(train, 12, seed=args.seed)
        if rbf is None:
            rbf = train_rbf(train, 12, 0.8, seed=args.seed)
    return mlp, rbf, train


def cmd_reproduce(args, argv):
    _positive_int(args.workers, "--workers")
    extra = None
    if args.target == "table1":
        train = _load_dataset(args.train) if args.train else generate_grid(DEFAULT_TRAIN_SPEC, workers=args.workers)
        rows = reproduce.table1(train, seed=args.seed)
    elif args.target in ("fig2", "fig3"):
        rows = getattr(reproduce, args.target)()
    else:
        mlp, rbf, _ = _models_for(args)
        if args.target == "table2":
            rows, extra = reproduce.table2(mlp, rbf)
        elif args.target == "table3":
            rows = reproduce.table3(mlp, rbf)
            extra = {"power_saving_2db": reproduce.power_saving()}
        else:
            rows = getattr(reproduce, args.target)(mlp, rbf)
    if args.format == "csv" and extra:
        sys.stderr.write(json.dumps(extra, indent=2, default=_json_default) + "\n")
    _emit(_render(rows, args.format, extra if args.format != "csv" else None), args, argv)


def cmd_rerun(args, argv):
    try:
        manifest = json.loads(args.manifest.read_text())
        old_argv = manifest["argv"]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    return run(old_argv)


COMMANDS = {
    "ber": cmd_ber,
    "sweep": cmd_sweep,
    "opt": cmd_opt,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "gen-dataset": cmd_gen_dataset,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "reproduce": cmd_reproduce,
    "rerun": cmd_rerun,
}


def run(argv: list[str]) -> int:
    try:
        args = build_parser().parse_args(argv)
        rc = COMMANDS[args.command](args, list(argv))
        return rc or EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except ThresholdSearchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONVERGENCE
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
