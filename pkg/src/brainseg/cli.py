"""Command-line interface: phantom, features, train, segment, evaluate, compare, hybrid.

Option precedence is explicit flag > JSON config file (--config) > built-in
default. The resolved algorithmic configuration is echoed into every JSON
output (and into a sibling ``run_config.json`` for commands whose outputs are
binary images), excluding file paths so identical runs into different
directories stay byte-identical. Errors print ``error[CODE]: message`` to
stderr and exit with status 1. All files are written atomically.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import evaluation, fusion, models
from .classifiers import CLASSIFIER_KINDS, segment_image
from .errors import BrainsegError, InvalidConfig
from .gabor import FeatureScaler, GaborConfig, build_filter_bank, extract_features
from .io import (
    load_dataset,
    load_image,
    load_manifest,
    save_image,
    save_label_map,
    save_manifest,
    write_atomic,
)
from .phantom import DEFAULT_TISSUE_MEANS, PhantomConfig, generate_phantom
from .rng import derive_seed
from .sampling import TrainingSet
from .tissue import OVERLAY_PALETTE, Tissue


def _fail_on_package_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BrainsegError as exc:
            click.echo(f"error[{exc.code}]: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise InvalidConfig(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"config file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidConfig("config file must hold a JSON object")
    return doc


def _resolve(flag_value, file_config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in file_config:
        return file_config[key]
    return default


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise InvalidConfig(f"expected comma-separated numbers, got {text!r}") from None


def _gabor_config(file_config: dict, frequencies, orientations, gamma, sigma,
                  radius) -> GaborConfig:
    section = file_config.get("gabor", {})
    cfg = GaborConfig(
        frequencies=tuple(
            _parse_floats(frequencies)
            if frequencies is not None
            else section.get("frequencies", GaborConfig().frequencies)
        ),
        orientations_deg=tuple(
            _parse_floats(orientations)
            if orientations is not None
            else section.get("orientations_deg", GaborConfig().orientations_deg)
        ),
        gamma_aspect=_resolve(gamma, section, "gamma_aspect", 0.5),
        sigma_envelope=_resolve(sigma, section, "sigma_envelope", None),
        kernel_radius=_resolve(radius, section, "kernel_radius", None),
    )
    cfg.validate()
    return cfg


def _classifier_params(kind: str, file_config: dict, flags: dict) -> dict:
    """Per-kind hyperparameters from flags over config-file sections."""
    section = dict(file_config.get(kind, {}))
    for key, value in flags.items():
        if value is not None:
            section[key] = value
    return section


_GABOR_OPTIONS = [
    click.option("--gabor-frequencies", default=None, help="Comma list, e.g. 0.1,0.2,0.4"),
    click.option("--gabor-orientations", default=None, help="Comma list of degrees"),
    click.option("--gabor-gamma", type=float, default=None, help="Envelope aspect ratio"),
    click.option("--gabor-sigma", type=float, default=None, help="Shared envelope sigma"),
    click.option("--gabor-radius", type=int, default=None, help="Shared kernel radius"),
]

_HYPER_OPTIONS = [
    click.option("--pnn-sigma", type=float, default=None),
    click.option("--knn-k", type=int, default=None),
    click.option("--isnn-mu", type=float, default=None),
    click.option("--isnn-epochs", type=int, default=None),
    click.option("--svm-c", type=float, default=None),
    click.option("--svm-kernel", type=click.Choice(["rbf", "linear"]), default=None),
    click.option("--svm-gamma", type=float, default=None),
    click.option("--svm-tol", type=float, default=None),
]


def _add_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func

    return wrap


def _hyper_params(file_config: dict, pnn_sigma, knn_k, isnn_mu, isnn_epochs,
                  svm_c, svm_kernel, svm_gamma, svm_tol) -> dict[str, dict]:
    return {
        "pnn": _classifier_params("pnn", file_config, {"sigma": pnn_sigma}),
        "knn": _classifier_params("knn", file_config, {"k": knn_k}),
        "isnn": _classifier_params(
            "isnn", file_config, {"mu": isnn_mu, "epochs": isnn_epochs}
        ),
        "svm": _classifier_params(
            "svm",
            file_config,
            {"C": svm_c, "kernel": svm_kernel, "gamma": svm_gamma, "tol": svm_tol},
        ),
    }


def _write_json(path: Path, doc: dict) -> None:
    write_atomic(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())


def _overlay_png(path: Path, labels: np.ndarray) -> None:
    rgb = np.zeros((*labels.shape, 3), dtype=np.uint8)
    for tissue, color in OVERLAY_PALETTE.items():
        rgb[labels == int(tissue)] = color
    from PIL import Image
    import io as _io

    buf = _io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    write_atomic(path, buf.getvalue())


@click.group()
def main() -> None:
    """Brain MR segmentation with Gabor texture features."""


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--count", type=int, default=None, help="Number of phantoms (default 11)")
@click.option("--size", type=int, default=None)
@click.option("--noise-sigma", type=float, default=None)
@click.option("--jitter", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--means", default=None,
              help="Comma list of 5 tissue means (background,skull,csf,gray,white)")
@click.option("--config", "config_path", type=click.Path(), default=None)
@_fail_on_package_errors
def phantom(out_dir, count, size, noise_sigma, jitter, seed, means, config_path):
    """Generate a seeded synthetic dataset with ground-truth labels."""
    file_config = _load_config_file(config_path)
    count = _resolve(count, file_config, "count", 11)
    size = _resolve(size, file_config, "size", 128)
    noise_sigma = _resolve(noise_sigma, file_config, "noise_sigma", 10.0)
    jitter = _resolve(jitter, file_config, "jitter", 0.05)
    seed = _resolve(seed, file_config, "seed", 0)
    means_text = _resolve(means, file_config, "means", None)
    if count < 1:
        raise InvalidConfig(f"count must be >= 1, got {count}")
    tissue_means = dict(DEFAULT_TISSUE_MEANS)
    if means_text is not None:
        values = (
            _parse_floats(means_text)
            if isinstance(means_text, str)
            else tuple(float(v) for v in means_text)
        )
        if len(values) != len(Tissue):
            raise InvalidConfig(f"means needs {len(Tissue)} values, got {len(values)}")
        tissue_means = {t: values[i] for i, t in enumerate(Tissue)}

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config_echo = {
        "command": "phantom",
        "count": count,
        "size": size,
        "noise_sigma": noise_sigma,
        "ellipse_jitter": jitter,
        "seed": seed,
        "tissue_means": {t.name.lower(): tissue_means[t] for t in Tissue},
    }
    entries = []
    for k in range(count):
        cfg = PhantomConfig(
            size=size,
            noise_sigma=noise_sigma,
            seed=derive_seed(seed, k),
            tissue_means=tissue_means,
            ellipse_jitter=jitter,
        )
        image, labels = generate_phantom(cfg)
        image_name = f"phantom_{k:02d}.pgm"
        label_name = f"phantom_{k:02d}_labels.pgm"
        save_image(out / image_name, image)
        save_label_map(out / label_name, labels)
        entries.append({"id": f"phantom_{k:02d}", "image": image_name,
                        "label": label_name})
    save_manifest(out / "manifest.json", entries, extra={"config": config_echo})
    click.echo(f"wrote {count} phantom pairs to {out}")


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--dump-pngs", is_flag=True, default=False,
              help="Also write each response channel as a min-max scaled PNG")
@click.option("--config", "config_path", type=click.Path(), default=None)
@_add_options(_GABOR_OPTIONS)
@_fail_on_package_errors
def features(image_path, out_dir, dump_pngs, config_path, gabor_frequencies,
             gabor_orientations, gabor_gamma, gabor_sigma, gabor_radius):
    """Extract the 9-channel texture feature grid for one image."""
    file_config = _load_config_file(config_path)
    gabor_config = _gabor_config(file_config, gabor_frequencies, gabor_orientations,
                                 gabor_gamma, gabor_sigma, gabor_radius)
    image = load_image(image_path)
    grid = extract_features(image, build_filter_bank(gabor_config))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    import io as _io

    buf = _io.BytesIO()
    np.save(buf, grid)
    write_atomic(out / "features.npy", buf.getvalue())
    if dump_pngs:
        for idx in range(grid.shape[2]):
            channel = grid[:, :, idx]
            span = channel.max() - channel.min()
            scaled = (
                np.zeros_like(channel)
                if span == 0
                else (channel - channel.min()) / span * 255.0
            )
            save_image(out / f"gabor_{idx:02d}.png", np.rint(scaled).astype(np.uint8))
    _write_json(out / "run_config.json",
                {"command": "features", "gabor": gabor_config.to_dict()})
    click.echo(f"wrote features for {image_path} to {out}")


def _train_bundle(manifest_path, kind, per_class, seed, gabor_config, params):
    manifest = load_manifest(manifest_path)
    pairs = load_dataset(manifest)
    grids = evaluation.compute_feature_grids(pairs, gabor_config)
    samples = evaluation.sample_dataset_points(pairs, grids, per_class, seed)
    pool = TrainingSet.concat(samples)
    scaler, clf = evaluation.train_fold(pool, kind, params)
    return scaler, clf


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--classifier", "kind", required=True,
              type=click.Choice(list(CLASSIFIER_KINDS)))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--per-class", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@_add_options(_GABOR_OPTIONS)
@_add_options(_HYPER_OPTIONS)
@_fail_on_package_errors
def train(manifest_path, kind, out_path, per_class, seed, config_path,
          gabor_frequencies, gabor_orientations, gabor_gamma, gabor_sigma,
          gabor_radius, pnn_sigma, knn_k, isnn_mu, isnn_epochs, svm_c,
          svm_kernel, svm_gamma, svm_tol):
    """Train one classifier on points pooled from every manifest image."""
    file_config = _load_config_file(config_path)
    per_class = _resolve(per_class, file_config, "per_class", 20)
    seed = _resolve(seed, file_config, "seed", 0)
    gabor_config = _gabor_config(file_config, gabor_frequencies, gabor_orientations,
                                 gabor_gamma, gabor_sigma, gabor_radius)
    params = _hyper_params(file_config, pnn_sigma, knn_k, isnn_mu, isnn_epochs,
                           svm_c, svm_kernel, svm_gamma, svm_tol)[kind]
    scaler, clf = _train_bundle(manifest_path, kind, per_class, seed, gabor_config,
                                params)
    config_echo = {
        "command": "train",
        "classifier": kind,
        "per_class": per_class,
        "seed": seed,
        "gabor": gabor_config.to_dict(),
        "params": params,
    }
    models.save_model(out_path, clf, scaler, gabor_config, config_echo)
    click.echo(f"wrote {kind} model to {out_path}")


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path())
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--overlay", "overlay_path", type=click.Path(), default=None)
@_fail_on_package_errors
def segment(image_path, model_path, out_path, overlay_path):
    """Segment one image with a trained model bundle."""
    classifier, scaler, gabor_config, config_echo = models.load_model(model_path)
    image = load_image(image_path)
    grid = extract_features(image, build_filter_bank(gabor_config))
    labels = segment_image(grid, scaler, classifier)
    save_label_map(out_path, labels)
    if overlay_path is not None:
        _overlay_png(Path(overlay_path), labels)
    _write_json(
        Path(out_path).with_suffix(".run_config.json"),
        {"command": "segment", "model_config": config_echo},
    )
    click.echo(f"wrote label map to {out_path}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--classifier", "kind", required=True,
              type=click.Choice(list(CLASSIFIER_KINDS)))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--per-class", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@_add_options(_GABOR_OPTIONS)
@_add_options(_HYPER_OPTIONS)
@_fail_on_package_errors
def evaluate(manifest_path, kind, out_dir, per_class, seed, config_path,
             gabor_frequencies, gabor_orientations, gabor_gamma, gabor_sigma,
             gabor_radius, pnn_sigma, knn_k, isnn_mu, isnn_epochs, svm_c,
             svm_kernel, svm_gamma, svm_tol):
    """Leave-one-out evaluation of one classifier over a dataset."""
    file_config = _load_config_file(config_path)
    per_class = _resolve(per_class, file_config, "per_class", 20)
    seed = _resolve(seed, file_config, "seed", 0)
    gabor_config = _gabor_config(file_config, gabor_frequencies, gabor_orientations,
                                 gabor_gamma, gabor_sigma, gabor_radius)
    params = _hyper_params(file_config, pnn_sigma, knn_k, isnn_mu, isnn_epochs,
                           svm_c, svm_kernel, svm_gamma, svm_tol)[kind]
    pairs = load_dataset(load_manifest(manifest_path))
    report = evaluation.run_loocv(
        pairs, kind, seed=seed, per_class=per_class, gabor_config=gabor_config,
        classifier_params=params, keep_predictions=False,
    )
    config_echo = {
        "command": "evaluate",
        "classifier": kind,
        "per_class": per_class,
        "seed": seed,
        "gabor": gabor_config.to_dict(),
        "params": params,
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_atomic(out / "report.csv", evaluation.report_csv([report]).encode())
    _write_json(out / "summary.json", evaluation.summary_doc([report], config_echo))
    _write_json(out / "timings.json", evaluation.timings_doc([report]))
    click.echo(f"wrote evaluation report to {out}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--per-class", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@_add_options(_GABOR_OPTIONS)
@_add_options(_HYPER_OPTIONS)
@_fail_on_package_errors
def compare(manifest_path, out_dir, per_class, seed, config_path,
            gabor_frequencies, gabor_orientations, gabor_gamma, gabor_sigma,
            gabor_radius, pnn_sigma, knn_k, isnn_mu, isnn_epochs, svm_c,
            svm_kernel, svm_gamma, svm_tol):
    """LOOCV all four classifiers, derive fusion rules, score the hybrid."""
    file_config = _load_config_file(config_path)
    per_class = _resolve(per_class, file_config, "per_class", 20)
    seed = _resolve(seed, file_config, "seed", 0)
    gabor_config = _gabor_config(file_config, gabor_frequencies, gabor_orientations,
                                 gabor_gamma, gabor_sigma, gabor_radius)
    all_params = _hyper_params(file_config, pnn_sigma, knn_k, isnn_mu, isnn_epochs,
                               svm_c, svm_kernel, svm_gamma, svm_tol)
    pairs = load_dataset(load_manifest(manifest_path))
    result = evaluation.compare_classifiers(
        pairs, seed=seed, per_class=per_class, gabor_config=gabor_config,
        classifier_params=all_params,
    )
    config_echo = {
        "command": "compare",
        "per_class": per_class,
        "seed": seed,
        "gabor": gabor_config.to_dict(),
        "params": all_params,
    }
    reports = [result.reports[k] for k in CLASSIFIER_KINDS] + [result.hybrid]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_atomic(out / "report.csv", evaluation.report_csv(reports).encode())
    _write_json(out / "summary.json", evaluation.summary_doc(reports, config_echo))
    fusion.save_rule_table(out / "rule_table.json", result.rules, config_echo)
    _write_json(out / "timings.json", evaluation.timings_doc(reports))
    click.echo(f"wrote comparison outputs to {out}")


@main.command()
@click.option("--rules", "rules_path", required=True, type=click.Path())
@click.option("--model", "model_specs", multiple=True,
              help="kind=path, one per classifier named by the rule table")
@click.option("--manifest", "manifest_path", type=click.Path(), default=None)
@click.option("--image", "image_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
@_fail_on_package_errors
def hybrid(rules_path, model_specs, manifest_path, image_path, out_dir):
    """Fuse per-classifier segmentations according to a rule table."""
    if (manifest_path is None) == (image_path is None):
        raise InvalidConfig("provide exactly one of --manifest or --image")
    rules = fusion.load_rule_table(rules_path)
    bundles = {}
    for spec in model_specs:
        kind, _, path = spec.partition("=")
        if not path:
            raise InvalidConfig(f"--model expects kind=path, got {spec!r}")
        bundles[kind] = models.load_model(path)
    needed = set(rules.assignment.values()) | {rules.fallback}
    missing = sorted(needed - set(bundles))
    if missing:
        raise InvalidConfig(f"rule table needs models for {missing}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def fuse_one(image: np.ndarray) -> np.ndarray:
        predictions = {}
        for kind, (clf, scaler, gabor_config, _) in bundles.items():
            grid = extract_features(image, build_filter_bank(gabor_config))
            predictions[kind] = segment_image(grid, scaler, clf)
        return fusion.hybrid_segment(predictions, rules)

    if image_path is not None:
        fused = fuse_one(load_image(image_path))
        save_label_map(out / "hybrid.pgm", fused)
    else:
        pairs = load_dataset(load_manifest(manifest_path))
        from .metrics import score_segmentation
        from .evaluation import EvalReport, FoldResult, report_csv

        folds = []
        for i, pair in enumerate(pairs):
            fused = fuse_one(pair.image)
            save_label_map(out / f"hybrid_{pair.id}.pgm", fused)
            folds.append(FoldResult(i, pair.id, score_segmentation(fused, pair.labels),
                                    0.0, None))
        write_atomic(out / "hybrid_report.csv",
                     report_csv([EvalReport("hybrid", folds)]).encode())
    _write_json(out / "run_config.json",
                {"command": "hybrid", "rules": rules.to_dict()})
    click.echo(f"wrote hybrid outputs to {out}")


if __name__ == "__main__":
    main()
