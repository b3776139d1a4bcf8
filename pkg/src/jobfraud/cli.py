"""Command-line entry points: eda, train, evaluate, predict, compare.

stdout carries only machine-readable payloads (JSON, CSV); diagnostics go
to stderr. Exit codes: 0 success, 1 usage, 2 data/parse, 3 model store,
4 numeric failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import MODEL_ALIASES, MODEL_KINDS, RunConfig, load_config
from .errors import (
    CsvParseError,
    DataError,
    ModelStoreError,
    NumericError,
    ShapeError,
    UsageError,
)
from .features import eda_report
from .ingest import assemble_dataset, load_dataset, parse_csv, read_csv, write_csv
from .metrics import compute_report, report_tables
from .pipeline import DetectionPipeline, prepare, train_pipeline
from .trainer import split_dataset


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="jobfraud", description="Fake job posting detection.")
    sub = parser.add_subparsers(dest="command", metavar="{eda,train,evaluate,predict,compare}")

    p = sub.add_parser("eda", help="dataset statistics as JSON")
    p.add_argument("--data", required=True)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train one model and save its bundle")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--model", choices=("bilstm", "rf", "gbm", "lgbt"), default=None)

    p = sub.add_parser("evaluate", help="score a saved model on a split")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", choices=("test", "val", "all"), default="test")
    p.add_argument("--threshold", type=float, default=0.5)

    p = sub.add_parser("predict", help="append probabilities to a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="train all four models on one split")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    return parser


def _load_run_config(path, seed=None, model=None) -> RunConfig:
    cfg = load_config(path) if path else RunConfig()
    if seed is not None:
        cfg = cfg.replace(seed=seed)
    if model is not None:
        cfg = cfg.replace(model=MODEL_ALIASES[model])
    return cfg


def _cmd_eda(args) -> int:
    dataset = load_dataset(args.data)
    report = eda_report(dataset, args.top_k)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_train(args) -> int:
    cfg = _load_run_config(args.config, args.seed, args.model)
    dataset = load_dataset(args.data)
    pipe = train_pipeline(dataset, cfg, cfg.model)
    pipe.save(args.out)
    payload = {
        "model": cfg.model,
        "history": pipe.history.to_dict() if pipe.history else None,
        "test_metrics": pipe.test_metrics.to_dict(),
    }
    print(json.dumps(payload, indent=2))
    return 0


def _split_indices(split: str, n: int, seed: int):
    if split == "all":
        return list(range(n))
    result = split_dataset(n, seed)
    return list(result.test if split == "test" else result.validation)


def _cmd_evaluate(args) -> int:
    pipe = DetectionPipeline.load(args.model)
    dataset = load_dataset(args.data)
    indices = _split_indices(args.split, len(dataset.postings), pipe.cfg.seed)
    postings = [dataset.postings[i] for i in indices]
    labels = np.array([p.fraudulent for p in postings])
    scores = pipe.predict_scores(postings)
    report = compute_report(labels, scores, args.threshold)
    print(json.dumps({"model": pipe.kind, "split": args.split, **report.to_dict()}, indent=2))
    return 0


def _cmd_predict(args) -> int:
    pipe = DetectionPipeline.load(args.model)
    header, raw_rows = read_csv(args.input)
    dataset = assemble_dataset(parse_csv(args.input))
    scores = pipe.predict_scores(dataset.postings)
    out_header = [h.strip() for h in header] + ["probability", "predicted_label"]
    out_rows = []
    for row, score in zip(raw_rows, scores):
        padded = list(row) + [""] * (len(header) - len(row))
        out_rows.append(padded + [f"{score:.6f}", str(int(score >= 0.5))])
    write_csv(args.out, out_header, out_rows)
    return 0


def _cmd_compare(args) -> int:
    cfg = _load_run_config(args.config)
    dataset = load_dataset(args.data)
    prepared = prepare(dataset, cfg, kinds=MODEL_KINDS)
    results = []
    histories = {}
    for kind in MODEL_KINDS:
        logging.getLogger(__name__).info("training %s", kind)
        pipe = train_pipeline(dataset, cfg, kind, prepared=prepared)
        results.append((kind, pipe.test_metrics))
        if pipe.history is not None:
            histories[kind] = pipe.history.to_dict()
    table_text, payload = report_tables(results)
    out_path = Path(args.out)
    out_path.write_text(table_text, encoding="utf-8")
    json_payload = {"reports": payload, "histories": histories}
    out_path.with_suffix(".json").write_text(
        json.dumps(json_payload, indent=2) + "\n", encoding="utf-8"
    )
    print(json.dumps(json_payload, indent=2))
    return 0


_COMMANDS = {
    "eda": _cmd_eda,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "compare": _cmd_compare,
}


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        if not argv:
            raise UsageError("a subcommand is required")
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except CsvParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ModelStoreError as exc:
        print(f"model store error: {exc}", file=sys.stderr)
        return 3
    except (NumericError, ShapeError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
