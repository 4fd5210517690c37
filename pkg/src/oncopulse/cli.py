"""Operator entry point: simulate, train, eval, explain, serve, report.

Exit codes: 0 success, 2 usage error (argparse), 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import OncopulseError


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oncopulse",
        description="Remote monitoring and cardiac-risk prediction toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic cohort with vitals")
    p.add_argument("--patients", type=_positive_int, required=True)
    p.add_argument("--days", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--signal-strength", type=float, default=1.0)
    p.add_argument("--vitals-days", type=int, default=None,
                   help="days of vitals to emit (default: the full study window)")

    p = sub.add_parser("train", help="fit the risk model on a cohort directory")
    p.add_argument("--cohort", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=_positive_int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=90.0)
    p.add_argument("--no-screen", action="store_true",
                   help="skip risk-factor screening of the static features")

    p = sub.add_parser("eval", help="report discrimination metrics for a model")
    p.add_argument("--model", required=True)
    p.add_argument("--cohort", required=True)
    p.add_argument("--horizon", type=float, default=None,
                   help="label events within this many days (default: whole study)")
    p.add_argument("--split", choices=["val", "all"], default="val",
                   help="held-out validation split (default) or the whole cohort")

    p = sub.add_parser("explain", help="assess one patient and print the explanation")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="service data directory")
    p.add_argument("--patient", required=True)
    p.add_argument("--date", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--save", action="store_true",
                   help="also append the assessment to the data directory")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True)

    p = sub.add_parser("report", help="print a patient's daily summary")
    p.add_argument("--data", required=True)
    p.add_argument("--patient", required=True)
    p.add_argument("--date", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")

    return parser


# -- subcommands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    from .sim import CohortSpec, emit_stream, generate_cohort, profile_record, save_cohort
    from .store import Store

    spec = CohortSpec(
        n_patients=args.patients,
        days=args.days,
        seed=args.seed,
        signal_strength=args.signal_strength,
        vitals_days=args.vitals_days,
    )
    cohort = generate_cohort(spec)
    save_cohort(cohort, args.out)
    store = Store(args.out)
    for profile in cohort.profiles:
        store.upsert_patient(profile_record(profile, spec))

    class _StoreSink:
        def send(self, payload: dict) -> None:
            store.ingest_vitals(payload)

    report = emit_stream(cohort, _StoreSink(), batch_seconds=3600)
    n_events = sum(1 for o in cohort.outcomes.values() if o.observed)
    print(f"cohort: {args.patients} patients, {args.days} days, seed {args.seed}")
    print(f"events observed: {n_events}")
    print(f"vitals: {report.samples} samples in {report.batches} batches -> {args.out}")
    return 0


def cmd_train(args) -> int:
    from .model import RiskModel, TrainConfig
    from .sim import load_cohort

    cohort = load_cohort(args.cohort)
    model = RiskModel.from_cohort(
        cohort,
        horizon_days=args.horizon,
        seed=args.seed,
        screen=not args.no_screen,
    )
    defaults = TrainConfig()
    config = TrainConfig(
        lr=defaults.lr if args.lr is None else args.lr,
        epochs=defaults.epochs if args.epochs is None else args.epochs,
        seed=args.seed,
    )
    result = model.fit(cohort, config)
    model.save(args.out)
    history_path = f"{args.out}.history.json"
    Path(history_path).write_text(
        json.dumps({"history": result.history, "best_epoch": result.best_epoch,
                    "best_val_nll": result.best_val_nll}, indent=2) + "\n",
        encoding="utf-8",
    )
    first, last = result.history[0], result.history[-1]
    print(f"trained {config.epochs} epochs on {len(cohort.profiles)} patients")
    print(f"train nll: {first['train_nll']:.4f} -> {last['train_nll']:.4f}")
    print(f"best val nll: {result.best_val_nll:.4f} (epoch {result.best_epoch})")
    print(f"model -> {args.out}")
    print(f"loss history -> {history_path}")
    return 0


def _eval_ids(model, cohort, split: str) -> list[str] | None:
    if split == "all":
        return None
    from .model.train import split_indices

    tc = model.train_config or {}
    _, val_idx = split_indices(
        len(cohort.profiles),
        float(tc.get("val_fraction", 0.2)),
        int(tc.get("seed", 0)),
    )
    return [cohort.profiles[i].patient_id for i in val_idx]


def cmd_eval(args) -> int:
    from .model import RiskModel, evaluate_model
    from .sim import load_cohort

    model = RiskModel.load(args.model)
    cohort = load_cohort(args.cohort)
    ids = _eval_ids(model, cohort, args.split)
    metrics = evaluate_model(model, cohort, ids, horizon_days=args.horizon)
    print(f"split={args.split} n={metrics['n']} events={metrics['n_events']}")
    print(f"auc={metrics['auc']:.4f}")
    print(f"concordance={metrics['concordance']:.4f}")
    return 0


def cmd_explain(args) -> int:
    from .assess import assess_patient, load_patient_visits
    from .model import RiskModel
    from .store import Store

    model = RiskModel.load(args.model)
    store = Store(args.data)
    visits = load_patient_visits(args.data, args.patient)
    assessment = assess_patient(
        model, store, args.patient, args.date, visits=visits, save=args.save,
    )
    if args.format == "json":
        print(json.dumps(assessment.to_dict(), indent=2, sort_keys=True))
        return 0
    print(f"patient {assessment.patient_id} on {args.date}")
    print(f"risk score: {assessment.score:.3f} ({assessment.score:.0%} within "
          f"{assessment.horizon_days:.0f} days)")
    print(f"tier: {assessment.tier}")
    print("attributions:")
    for a in assessment.attributions:
        print(f"  {a.label:<22} phi={a.phi:+.4f} share={a.share:.0%}")
    print(assessment.narrative)
    if args.save:
        print("(assessment saved)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app, load_api_config

    config = load_api_config(args.config)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_report(args) -> int:
    from .store import Store
    from .summary import baselines_from_store, build_daily_summary

    store = Store(args.data)
    summary = build_daily_summary(
        args.patient, args.date, store, baselines_from_store(store, args.patient),
    )
    if args.format == "json":
        print(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    else:
        print(summary.rendered_text)
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "eval": cmd_eval,
    "explain": cmd_explain,
    "serve": cmd_serve,
    "report": cmd_report,
}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OncopulseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
