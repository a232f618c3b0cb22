"""Command-line entry points.

    incontext synth     build a synthetic COCO-style dataset
    incontext generate  render stimulus conditions into a trial manifest
    incontext keygen    derive a starter answer key from a manifest
    incontext train     train the recognizer on full-context trials
    incontext eval      run a checkpoint over a manifest -> results CSV
    incontext report    per-condition reports and the comparison summary
    incontext serve     run the experiment service
"""

import argparse
import csv
import json
import os
import sys

from .stimuli import (BalanceConfig, StimulusCondition, TimingConfig,
                      compose_trial_manifest, ingest_annotations,
                      read_manifest, select_targets)
from .stimuli.conditions import (CO_RATIOS, SIGMAS, GRIDS, CONGRUENCES,
                                 EXPOSURES_MS, T1_MS, T2_MS)
from .stimuli.images import load_rgb
from .stimuli.synthetic import SyntheticConfig, build_synthetic_dataset

EXPERIMENT_FAMILIES = {
    "A1": lambda seed: [StimulusCondition("A1_minimal", seed=seed),
                        StimulusCondition("A1_full", seed=seed)],
    "A2": lambda seed: [StimulusCondition("A2_co", co_ratio=c, seed=seed)
                        for c in CO_RATIOS],
    "B1": lambda seed: [StimulusCondition("B1_blur_ctx", sigma=s, seed=seed)
                        for s in SIGMAS],
    "B2": lambda seed: [StimulusCondition("B2_blur_obj", sigma=s, seed=seed)
                        for s in SIGMAS],
    "B3": lambda seed: [StimulusCondition("B3_texture", seed=seed)],
    "B4": lambda seed: [StimulusCondition("B4_jigsaw", grid=g, seed=seed)
                        for g in GRIDS],
    "B5": lambda seed: [StimulusCondition("B5_congruence", congruence=c,
                                          seed=seed) for c in CONGRUENCES],
    "C1": lambda seed: [StimulusCondition("C1_exposure", exposure_ms=t,
                                          seed=seed) for t in EXPOSURES_MS],
    "C2": lambda seed: [StimulusCondition("C2_masking", exposure_ms=t,
                                          seed=seed) for t in EXPOSURES_MS],
    "C3": lambda seed: [StimulusCondition("C3_async", t1_ms=t1, t2_ms=t2,
                                          seed=seed)
                        for t1 in T1_MS for t2 in T2_MS],
}


def expand_experiments(spec, seed):
    conditions = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if token in EXPERIMENT_FAMILIES:
            conditions.extend(EXPERIMENT_FAMILIES[token](seed))
        else:
            conditions.append(StimulusCondition(token, seed=seed))
    if not conditions:
        raise SystemExit("no experiments requested")
    return conditions


def cmd_synth(args):
    cfg = SyntheticConfig(classes=args.classes, image_size=args.image_size,
                          object_sizes=tuple(
                              int(s) for s in args.sizes.split(",")))
    paths = build_synthetic_dataset(args.out, args.images, cfg=cfg,
                                    seed=args.seed)
    print(f"wrote {args.images} images under {paths['images']}")
    print(f"annotations: {paths['annotations']}")


def cmd_generate(args):
    result = ingest_annotations(args.annotations, args.images,
                                extent_metric=args.extent_metric)
    if result.errors:
        print(f"{len(result.errors)} annotation entries skipped "
              f"(first: {result.errors[0]['reason']})", file=sys.stderr)
    targets = result.targets
    if args.per_cell or args.total:
        sizes = tuple(s.strip() for s in args.sizes.split(","))
        config = BalanceConfig(sizes=sizes, per_cell=args.per_cell,
                               total=args.total)
        targets = select_targets(targets, config, args.seed)
    else:
        if args.sizes != "all":
            wanted = {s.strip() for s in args.sizes.split(",")}
            targets = [t for t in targets if t.size_bin in wanted]
        seen = set()
        unique = []
        for t in sorted(targets, key=lambda t: (t.image_id, t.bbox)):
            if t.image_id not in seen:
                seen.add(t.image_id)
                unique.append(t)
        targets = unique
    if not targets:
        raise SystemExit("no targets to render")

    conditions = expand_experiments(args.experiments, args.seed)
    timing = TimingConfig(exposure_ms=args.exposure)
    image_root = args.images
    loader = lambda t: load_rgb(os.path.join(image_root, t.file_name))
    manifest = compose_trial_manifest(
        targets, conditions, timing, args.out, loader,
        generator_config={"seed": args.seed, "annotations": args.annotations,
                          "extent_metric": args.extent_metric},
        donor_pool=result.targets)
    dropped = manifest.generator_config["dropped"]
    print(f"manifest: {len(manifest.entries)} trials "
          f"({len(dropped)} dropped) -> {args.out}")
    print(f"dataset digest: {manifest.dataset_digest}")


def cmd_keygen(args):
    from .evalstats import build_answer_key
    manifest = read_manifest(_manifest_dir(args.manifest))
    key = build_answer_key(manifest)
    with open(args.out, "w") as f:
        json.dump(key, f, indent=0, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(key)} answer-key entries to {args.out}")


def _manifest_dir(path):
    """Accept either the manifest directory or its manifest.jsonl path."""
    if path.endswith(".jsonl"):
        return os.path.dirname(os.path.abspath(path)) or "."
    return path


def _load_json(path):
    if path is None:
        return {}
    with open(path) as f:
        return json.load(f)


def cmd_train(args):
    from .model import ModelConfig, TrainConfig, train_to_checkpoint
    data_dir = _manifest_dir(args.data)
    manifest = read_manifest(data_dir)
    categories = sorted({e.target.category for e in manifest.entries})
    doc = _load_json(args.config)
    model_dict = dict(doc.get("model", {}))
    model_dict.setdefault("C", len(categories))
    model_config = ModelConfig.from_dict(model_dict)
    train_dict = dict(doc.get("train", {}))
    if args.steps is not None:
        train_dict["steps"] = args.steps
    train_config = TrainConfig(**train_dict)

    def log(step, loss):
        print(f"step {step:6d}  loss {loss:.4f}", flush=True)

    _, cats, curve = train_to_checkpoint(
        manifest, data_dir, model_config, train_config, args.out,
        callback=log)
    print(f"checkpoint -> {args.out} ({len(cats)} classes, "
          f"final loss {curve[-1][1]:.4f})")


def cmd_eval(args):
    from .model import CATNet, load_checkpoint, evaluate_manifest
    params, config, categories, _ = load_checkpoint(args.ckpt)
    model = CATNet(config, params)
    manifest_dir = _manifest_dir(args.manifest)
    manifest = read_manifest(manifest_dir)
    n, skipped = evaluate_manifest(model, categories, manifest,
                                   manifest_dir, args.out,
                                   attention_dir=args.attention_dir)
    print(f"evaluated {n} trials -> {args.out}")
    for trial_id, reason in skipped:
        print(f"skipped {trial_id}: {reason}", file=sys.stderr)


def cmd_report(args):
    from .evalstats import (condition_report, format_summary,
                            human_records_from_responses, load_answer_key,
                            model_records_from_results, summary_table,
                            write_condition_csv, write_summary_csv)
    os.makedirs(args.out, exist_ok=True)
    model_reports = []
    human_reports = []
    if args.model_results:
        with open(args.model_results, newline="") as f:
            rows = list(csv.DictReader(f))
        records = model_records_from_results(rows)
        model_reports = condition_report(records)
        write_condition_csv(os.path.join(args.out, "model_report.csv"),
                            model_reports)
    if args.human_results:
        if not args.key:
            raise SystemExit("--human-results requires --key")
        key = load_answer_key(args.key)
        with open(args.human_results, newline="") as f:
            rows = list(csv.DictReader(f))
        records = human_records_from_responses(rows, key)
        human_reports = condition_report(records)
        write_condition_csv(os.path.join(args.out, "human_report.csv"),
                            human_reports)
    if not model_reports and not human_reports:
        raise SystemExit("nothing to report")
    table = summary_table(human_reports, model_reports)
    write_summary_csv(os.path.join(args.out, "summary.csv"), table)
    print(format_summary(table))


def cmd_serve(args):
    import uvicorn
    from .service import create_app
    app = create_app(_manifest_dir(args.manifest), args.store,
                     assets_dir=args.assets)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="incontext",
        description="context-aware recognition experiment toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="build a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--images", type=int, required=True)
    p.add_argument("--classes", type=int, default=8)
    p.add_argument("--image-size", type=int, default=64)
    p.add_argument("--sizes", default="8,32",
                   help="object sizes in px, comma separated")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("generate", help="render a trial manifest")
    p.add_argument("--annotations", required=True)
    p.add_argument("--images", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--experiments", required=True,
                   help="families (A1,A2,B1..C3) or exact condition ids")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="S1,S2,S4,S8",
                   help="size bins, or 'all' to skip size filtering")
    p.add_argument("--per-cell", type=int, default=None)
    p.add_argument("--total", type=int, default=None)
    p.add_argument("--exposure", type=int, default=200)
    p.add_argument("--extent-metric", default="geomean",
                   choices=("geomean", "long_side", "short_side"))
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("keygen", help="answer key from manifest categories")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("train", help="train on full-context trials")
    p.add_argument("--data", required=True, help="manifest directory")
    p.add_argument("--config", default=None,
                   help="json file with model/train sections")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", required=True, help="checkpoint path (.npz)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint over a manifest")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="results CSV path")
    p.add_argument("--attention-dir", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="per-condition reports + summary")
    p.add_argument("--model-results", default=None)
    p.add_argument("--human-results", default=None)
    p.add_argument("--key", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the experiment service")
    p.add_argument("--manifest", required=True)
    p.add_argument("--assets", default=None,
                   help="asset root (defaults to the manifest directory)")
    p.add_argument("--store", required=True)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
