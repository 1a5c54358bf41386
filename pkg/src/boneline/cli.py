"""Command-line pipeline driver.

Stages: enhance, detect, features, analyze, adpo, region, label-serve, train,
eval-images, eval-lines, roc.  Every stage reads and writes the documented
file formats, so the output of one stage parses as the input of the next.
Flags override config-file values; environment variables with the BONELINE_
prefix (BONELINE_CONFIG, BONELINE_SEED, BONELINE_OUT_DIR, BONELINE_SCHEME,
BONELINE_PORT) override flag defaults.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import adpo as adpo_mod
from . import evaluation, fileio, plots, synthetic
from .analysis import contributions_csv, correlation_csv, correlation_matrix, pca_contribution
from .config import default_config, load_config
from .errors import BonelineError, ConfigError
from .features import CSV_HEADER, FEATURE_NAMES, LineFeatureExtractor, features_to_csv
from .hough import HoughParams, detect_lines, segments_to_csv, segments_to_json
from .imaging import canny, enhance
from .network import LabeledDataset, NetworkModel, infer_batch, train
from .region_filter import bone_bounds, density_profile, filter_leg_lines, profile_to_csv, window_length
from .validation import normalize_segments

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_MISSING_INPUT = 4
EXIT_RUNTIME = 5

ENV_PREFIX = "BONELINE_"


def _env(name, fallback=None):
    return os.environ.get(ENV_PREFIX + name, fallback)


def _load_cfg(args):
    path = args.config or _env("CONFIG")
    if path:
        if not os.path.exists(path):
            raise FileNotFoundError(path)
        return load_config(path)
    return default_config()


def _image_paths(args):
    paths = []
    for entry in args.inputs:
        if os.path.isdir(entry):
            paths.extend(os.path.join(entry, n) for n in sorted(os.listdir(entry))
                         if n.lower().endswith((".png", ".jpg", ".jpeg")))
        elif os.path.exists(entry):
            paths.append(entry)
        else:
            raise FileNotFoundError(entry)
    if not paths:
        raise FileNotFoundError("no input images found")
    return paths


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def _standard_params(cfg, args):
    params = cfg.standard
    if getattr(args, "scheme", "standard") == "adpo":
        params = cfg.adpo.base_params()
    return params


def cmd_enhance(args):
    cfg = _load_cfg(args)
    for path in _image_paths(args):
        img = fileio.read_gray_image(path)
        out = enhance(img, cfg.enhancement)
        edges = canny(out, cfg.enhancement.canny_low, cfg.enhancement.canny_high)
        stem = _stem(path)
        fileio.write_image(os.path.join(args.out_dir, "images", stem + ".png"), out)
        fileio.write_image(os.path.join(args.out_dir, "edges", stem + ".png"), edges)
    return EXIT_OK


def cmd_detect(args):
    cfg = _load_cfg(args)
    for path in _image_paths(args):
        edges = fileio.read_gray_image(path)
        stem = _stem(path)
        if args.scheme == "adpo":
            sweep = adpo_mod.optimize_min_line_length(
                edges, cfg.adpo.base_params(), seed=args.seed,
                absolute=cfg.adpo.absolute_argmax)
            lines = adpo_mod.borrow_lines(sweep)
            fileio.write_text(os.path.join(args.out_dir, "adpo", stem + ".csv"),
                              adpo_mod.sweep_to_csv(sweep))
        else:
            lines = detect_lines(edges, cfg.standard, seed=args.seed)
        lines = normalize_segments(lines)
        fileio.write_text(os.path.join(args.out_dir, "lines", stem + ".json"),
                          segments_to_json(lines))
        fileio.write_text(os.path.join(args.out_dir, "lines", stem + ".csv"),
                          segments_to_csv(lines, stem))
    return EXIT_OK


def _read_lines_dir(args):
    entries = []
    for entry in args.inputs:
        if os.path.isdir(entry):
            entries.extend(os.path.join(entry, n) for n in sorted(os.listdir(entry))
                           if n.endswith(".json"))
        elif os.path.exists(entry):
            entries.append(entry)
        else:
            raise FileNotFoundError(entry)
    if not entries:
        raise FileNotFoundError("no line files found")
    return entries


def cmd_features(args):
    from .hough import segments_from_json

    cfg = _load_cfg(args)
    for path in _read_lines_dir(args):
        stem = _stem(path)
        lines = segments_from_json(fileio.read_text(path))
        edge_path = os.path.join(args.edges, stem + ".png")
        if not os.path.exists(edge_path):
            raise FileNotFoundError(edge_path)
        height = fileio.read_gray_image(edge_path).shape[0]
        if len(lines) == 0:
            fileio.write_text(os.path.join(args.out_dir, "features", stem + ".csv"),
                              ",".join(CSV_HEADER) + "\r\n")
            continue
        extractor = LineFeatureExtractor(bin_width=cfg.features.bin_width,
                                         knee_frac=cfg.features.knee_frac,
                                         foot_frac=cfg.features.foot_frac)
        feats = extractor.fit_transform(lines, height)
        fileio.write_text(os.path.join(args.out_dir, "features", stem + ".csv"),
                          features_to_csv(feats, [stem] * len(feats), range(len(feats))))
    return EXIT_OK


def _load_feature_matrix(args):
    from .features import features_from_csv

    mats = []
    for entry in args.inputs:
        paths = ([os.path.join(entry, n) for n in sorted(os.listdir(entry))
                  if n.endswith(".csv")] if os.path.isdir(entry) else [entry])
        for path in paths:
            if not os.path.exists(path):
                raise FileNotFoundError(path)
            _, _, feats = features_from_csv(fileio.read_text(path))
            if len(feats):
                mats.append(feats)
    if not mats:
        raise FileNotFoundError("no feature rows found")
    return np.vstack(mats)


def cmd_analyze(args):
    X = _load_feature_matrix(args)[:, :13]  # geometric features only
    names = FEATURE_NAMES[:13]
    corr = correlation_matrix(X)
    report = pca_contribution(X)
    fileio.write_text(os.path.join(args.out_dir, "correlation.csv"),
                      correlation_csv(corr, names))
    fileio.write_text(os.path.join(args.out_dir, "contributions.csv"),
                      contributions_csv(report, names))
    plots.plot_correlation(corr, names, os.path.join(args.out_dir, "correlation.svg"))
    plots.plot_contributions(report, names, os.path.join(args.out_dir, "contributions.svg"))
    return EXIT_OK


def cmd_adpo(args):
    cfg = _load_cfg(args)
    for path in _image_paths(args):
        edges = fileio.read_gray_image(path)
        stem = _stem(path)
        if args.gap_sweep:
            counts = adpo_mod.gap_sweep(edges, cfg.adpo.base_params(), seed=args.seed)
            text = "max_line_gap,num_lines\n" + "".join(
                f"{g},{n}\n" for g, n in counts.items())
            fileio.write_text(os.path.join(args.out_dir, "adpo", stem + "_gaps.csv"), text)
            continue
        sweep = adpo_mod.optimize_min_line_length(
            edges, cfg.adpo.base_params(), seed=args.seed,
            absolute=cfg.adpo.absolute_argmax)
        fileio.write_text(os.path.join(args.out_dir, "adpo", stem + ".csv"),
                          adpo_mod.sweep_to_csv(sweep))
        fileio.write_text(os.path.join(args.out_dir, "adpo", stem + "_lines.json"),
                          segments_to_json(adpo_mod.borrow_lines(sweep)))
    return EXIT_OK


def cmd_region(args):
    from .hough import segments_from_json

    cfg = _load_cfg(args)
    for path in _read_lines_dir(args):
        stem = _stem(path)
        lines = segments_from_json(fileio.read_text(path))
        width = args.width
        if width is None:
            edge_path = os.path.join(args.edges or "", stem + ".png")
            if not os.path.exists(edge_path):
                raise FileNotFoundError(f"--width not given and {edge_path} missing")
            width = fileio.read_gray_image(edge_path).shape[1]
        profile = density_profile(lines, width, cfg.region.window_frac)
        radius = cfg.region.smooth_radius
        if radius < 0:
            radius = window_length(width, cfg.region.window_frac) // 2
        bounds = bone_bounds(profile, radius)
        kept = filter_leg_lines(normalize_segments(lines), bounds)
        fileio.write_text(os.path.join(args.out_dir, "region", stem + "_profile.csv"),
                          profile_to_csv(profile))
        fileio.write_text(os.path.join(args.out_dir, "region", stem + "_bounds.json"),
                          json.dumps({"lower": bounds[0], "upper": bounds[1]}))
        fileio.write_text(os.path.join(args.out_dir, "region", stem + "_lines.json"),
                          segments_to_json(kept))
        plots.plot_profile(profile, bounds,
                           os.path.join(args.out_dir, "region", stem + "_profile.svg"))
    return EXIT_OK


def cmd_label_serve(args):
    from .service import serve

    serve(args.data_dir, port=args.port)
    return EXIT_OK


def cmd_train(args):
    cfg = _load_cfg(args)
    if not os.path.exists(args.dataset):
        raise FileNotFoundError(args.dataset)
    data = fileio.dataset_from_csv(fileio.read_text(args.dataset))
    model, trace = train(data, cfg.training, seed=args.seed)
    fileio.write_text(os.path.join(args.out_dir, "model.json"), model.to_json())
    fileio.write_text(os.path.join(args.out_dir, "trace.csv"),
                      "epoch,mse\n" + "".join(f"{i},{m:.8f}\n" for i, m in enumerate(trace)))
    return EXIT_OK


def _corpus_datasets(cfg, args, scheme):
    corpus = synthetic.make_corpus(cfg.corpus.n_images, seed=args.seed,
                                   width=cfg.corpus.width, height=cfg.corpus.height)
    datasets = synthetic.build_corpus_datasets(
        corpus, scheme=scheme, seed=args.seed,
        enhancement=cfg.enhancement, standard_params=cfg.standard,
        adpo_base=cfg.adpo.base_params(), adpo_absolute=cfg.adpo.absolute_argmax,
        bin_width=cfg.features.bin_width, knee_frac=cfg.features.knee_frac,
        foot_frac=cfg.features.foot_frac, window_frac=cfg.region.window_frac)
    return [d for d in datasets if len(d)]


def _split_pools(datasets, n_train, n_test):
    if len(datasets) < n_train + n_test:
        raise ConfigError(f"corpus of {len(datasets)} images cannot supply "
                          f"{n_train} train + {n_test} test")
    return datasets[:n_train], datasets[n_train:n_train + n_test]


def cmd_eval_images(args):
    cfg = _load_cfg(args)
    n_test = args.test_images or cfg.evaluation.test_images
    train_pool, test_pool = _split_pools(_corpus_datasets(cfg, args, args.scheme),
                                         cfg.evaluation.train_images, n_test)
    results = evaluation.image_case_sweep(
        train_pool, test_pool, cfg.training, n_cases=cfg.evaluation.n_cases,
        sims=cfg.evaluation.sims, master_seed=cfg.evaluation.master_seed)
    base = os.path.join(args.out_dir, f"cases_images_{args.scheme}")
    fileio.write_text(base + ".csv", evaluation.case_results_to_csv(results))
    fileio.write_text(base + ".json", evaluation.case_results_to_json(results))
    plots.plot_accuracy_cases(results, base + ".svg",
                              title=f"image cases ({args.scheme})")
    return EXIT_OK


def cmd_eval_lines(args):
    cfg = _load_cfg(args)
    train_pool, test_pool = _split_pools(_corpus_datasets(cfg, args, args.scheme),
                                         cfg.evaluation.train_images,
                                         args.test_images or cfg.evaluation.test_images)
    pool = LabeledDataset(X=np.vstack([d.X for d in train_pool]),
                          y=np.concatenate([d.y for d in train_pool]))
    test = LabeledDataset(X=np.vstack([d.X for d in test_pool]),
                          y=np.concatenate([d.y for d in test_pool]))
    results = evaluation.line_case_sweep(
        pool, test, cfg.training, group_size=cfg.evaluation.group_size,
        max_lines=args.max_lines or cfg.evaluation.max_lines,
        master_seed=cfg.evaluation.master_seed)
    base = os.path.join(args.out_dir, f"cases_lines_{args.scheme}")
    fileio.write_text(base + ".csv", evaluation.case_results_to_csv(results))
    fileio.write_text(base + ".json", evaluation.case_results_to_json(results))
    plots.plot_accuracy_cases(results, base + ".svg",
                              title=f"line cases ({args.scheme})")
    return EXIT_OK


def cmd_roc(args):
    if args.scores:
        if not os.path.exists(args.scores):
            raise FileNotFoundError(args.scores)
        rows = fileio.read_text(args.scores).strip().splitlines()
        if rows and rows[0].replace(" ", "") == "score,truth":
            rows = rows[1:]
        scored = [(float(r.split(",")[0]), float(r.split(",")[1])) for r in rows if r]
    else:
        if not (args.model and args.dataset):
            raise ConfigError("roc needs either --scores or both --model and --dataset")
        for path in (args.model, args.dataset):
            if not os.path.exists(path):
                raise FileNotFoundError(path)
        model = NetworkModel.from_json(fileio.read_text(args.model))
        data = fileio.dataset_from_csv(fileio.read_text(args.dataset))
        scored = list(zip(infer_batch(model, data.X), data.y))
    curve = evaluation.roc(scored)
    fileio.write_text(os.path.join(args.out_dir, "roc.csv"),
                      evaluation.roc_points_to_csv(curve))
    fileio.write_text(os.path.join(args.out_dir, "auc.json"),
                      json.dumps({"auc": curve.auc}))
    plots.plot_roc(curve, os.path.join(args.out_dir, "roc.svg"),
                   fit=evaluation.monotone_fit(curve))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="boneline",
        description="Line-based long-bone fracture detection pipeline")
    sub = parser.add_subparsers(dest="stage", required=True)

    def common(p, inputs=True):
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
        p.add_argument("--out-dir", default=_env("OUT_DIR", "out"))
        if inputs:
            p.add_argument("inputs", nargs="+", help="input files or directories")

    p = sub.add_parser("enhance", help="enhance images and write edge maps")
    common(p)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("detect", help="detect line segments in edge maps")
    common(p)
    p.add_argument("--scheme", choices=("standard", "adpo"),
                   default=_env("SCHEME", "standard"))
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("features", help="extract per-line features")
    common(p)
    p.add_argument("--edges", required=True, help="edge-map directory (for image size)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("analyze", help="correlation map and feature contributions")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("adpo", help="minimum-line-length sweep report")
    common(p)
    p.add_argument("--gap-sweep", action="store_true",
                   help="emit the diagnostic line-count sweep over gaps 10..20")
    p.set_defaults(func=cmd_adpo)

    p = sub.add_parser("region", help="bone-region density profile and filtering")
    common(p)
    p.add_argument("--edges", default=None, help="edge-map directory (for image width)")
    p.add_argument("--width", type=int, default=None)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("label-serve", help="run the labeling HTTP service")
    p.add_argument("--config", default=None)
    p.add_argument("--data-dir", default=_env("DATA_DIR", "out"))
    p.add_argument("--port", type=int, default=int(_env("PORT", "8500")))
    p.set_defaults(func=cmd_label_serve)

    p = sub.add_parser("train", help="train the line classifier on a dataset CSV")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
    p.add_argument("--out-dir", default=_env("OUT_DIR", "out"))
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_train)

    for name, func in (("eval-images", cmd_eval_images), ("eval-lines", cmd_eval_lines)):
        p = sub.add_parser(name, help=f"{name} sweep on the synthetic corpus")
        p.add_argument("--config", default=None)
        p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
        p.add_argument("--out-dir", default=_env("OUT_DIR", "out"))
        p.add_argument("--scheme", choices=("standard", "adpo"),
                       default=_env("SCHEME", "standard"))
        p.add_argument("--test-images", type=int, default=None)
        if name == "eval-lines":
            p.add_argument("--max-lines", type=int, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("roc", help="ROC curve and AUC")
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", default=_env("OUT_DIR", "out"))
    p.add_argument("--scores", default=None, help="CSV of score,truth rows")
    p.add_argument("--model", default=None)
    p.add_argument("--dataset", default=None)
    p.set_defaults(func=cmd_roc)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except BonelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
