"""Leave-one-out cross-validation over a labeled image dataset.

Each image is held out once; training points are pooled from every other
image. Per-image point sampling uses the child seed ``derive_seed(seed, j)``
where j is the image's dataset position, so a fold's training pool never
depends on the held-out image's content and identical seeds reproduce
identical pools. Feature normalization is fitted on the fold's training pool
only. The same per-image samples are shared by all classifiers in a
comparison run.

Report serialization: a CSV with columns fold, classifier, tissue, tp, fp,
fn, precision, recall, f_measure, degenerate (rows ordered by classifier,
fold, tissue code) and a JSON summary with per-tissue and overall mean F per
classifier. Wall-clock fold runtimes live only in the in-memory report and
the optional timings sidecar, keeping serialized reports byte-reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .classifiers import CLASSIFIER_KINDS, make_classifier, segment_image
from .errors import EmptyDataset
from .fusion import KIND_PRECEDENCE, RuleTable, derive_rule_table, hybrid_segment
from .gabor import FeatureScaler, GaborConfig, build_filter_bank, extract_features
from .io import LoadedImagePair
from .metrics import TissueScore, score_segmentation
from .rng import derive_seed
from .sampling import TrainingSet, sample_training_points
from .tissue import TISSUE_NAMES, Tissue


@dataclass
class FoldResult:
    fold: int
    image_id: str
    scores: dict[Tissue, TissueScore]
    runtime_sec: float
    prediction: np.ndarray | None = field(default=None, repr=False)


@dataclass
class EvalReport:
    classifier: str
    folds: list[FoldResult]

    def per_tissue_mean_f(self) -> dict[Tissue, float]:
        return {
            t: float(np.mean([fr.scores[t].f_measure for fr in self.folds]))
            for t in Tissue
        }

    def overall_mean_f(self) -> float:
        """Fold-mean of the per-fold tissue-mean F."""
        per_fold = [
            np.mean([fr.scores[t].f_measure for t in Tissue]) for fr in self.folds
        ]
        return float(np.mean(per_fold))


def compute_feature_grids(pairs: list[LoadedImagePair],
                          gabor_config: GaborConfig | None = None) -> list[np.ndarray]:
    bank = build_filter_bank(gabor_config)
    return [extract_features(p.image, bank) for p in pairs]


def sample_dataset_points(pairs: list[LoadedImagePair], grids: list[np.ndarray],
                          per_class: int, seed: int) -> list[TrainingSet]:
    """Per-image balanced samples, one child RNG stream per dataset position."""
    return [
        sample_training_points(grid, pair.labels, per_class,
                               derive_seed(seed, j), pair.id)
        for j, (pair, grid) in enumerate(zip(pairs, grids))
    ]


def fold_pool(samples: list[TrainingSet], fold: int) -> TrainingSet:
    """Training pool for one fold: every image's sample except the held-out one."""
    return TrainingSet.concat([s for j, s in enumerate(samples) if j != fold])


def train_fold(pool: TrainingSet, kind: str, classifier_params: dict | None = None):
    """Fit the scaler on the pool and train one classifier on normalized rows."""
    scaler = FeatureScaler().fit(pool.features)
    clf = make_classifier(kind, **(classifier_params or {}))
    clf.fit(scaler.transform(pool.features), pool.labels)
    return scaler, clf


def run_loocv(
    pairs: list[LoadedImagePair],
    kind: str,
    *,
    seed: int,
    per_class: int = 20,
    gabor_config: GaborConfig | None = None,
    classifier_params: dict | None = None,
    grids: list[np.ndarray] | None = None,
    samples: list[TrainingSet] | None = None,
    keep_predictions: bool = True,
) -> EvalReport:
    """Evaluate one classifier by leave-one-out cross-validation."""
    if len(pairs) < 2:
        raise EmptyDataset(f"LOOCV needs at least 2 images, got {len(pairs)}")
    if grids is None:
        grids = compute_feature_grids(pairs, gabor_config)
    if samples is None:
        samples = sample_dataset_points(pairs, grids, per_class, seed)
    folds = []
    for i, pair in enumerate(pairs):
        start = time.perf_counter()
        scaler, clf = train_fold(fold_pool(samples, i), kind, classifier_params)
        prediction = segment_image(grids[i], scaler, clf)
        runtime = time.perf_counter() - start
        folds.append(
            FoldResult(
                fold=i,
                image_id=pair.id,
                scores=score_segmentation(prediction, pair.labels),
                runtime_sec=runtime,
                prediction=prediction if keep_predictions else None,
            )
        )
    return EvalReport(classifier=kind, folds=folds)


@dataclass
class ComparisonTable:
    mean_f: dict[str, dict[Tissue, float]]
    overall: dict[str, float]
    ranking: list[str]


def aggregate_reports(reports: dict[str, EvalReport]) -> ComparisonTable:
    """Mean-F table and overall ranking (best first) across classifiers."""
    mean_f = {kind: report.per_tissue_mean_f() for kind, report in reports.items()}
    overall = {kind: report.overall_mean_f() for kind, report in reports.items()}

    def rank_key(kind: str) -> tuple:
        prec = (
            KIND_PRECEDENCE.index(kind)
            if kind in KIND_PRECEDENCE
            else len(KIND_PRECEDENCE)
        )
        return (-overall[kind], prec, kind)

    return ComparisonTable(
        mean_f=mean_f, overall=overall, ranking=sorted(reports, key=rank_key)
    )


@dataclass
class CompareResult:
    reports: dict[str, EvalReport]
    table: ComparisonTable
    rules: RuleTable
    hybrid: EvalReport


def compare_classifiers(
    pairs: list[LoadedImagePair],
    *,
    seed: int,
    per_class: int = 20,
    gabor_config: GaborConfig | None = None,
    classifier_params: dict[str, dict] | None = None,
) -> CompareResult:
    """LOOCV all four classifiers on shared samples, derive rules, fuse."""
    grids = compute_feature_grids(pairs, gabor_config)
    samples = sample_dataset_points(pairs, grids, per_class, seed)
    classifier_params = classifier_params or {}
    reports = {
        kind: run_loocv(
            pairs,
            kind,
            seed=seed,
            per_class=per_class,
            gabor_config=gabor_config,
            classifier_params=classifier_params.get(kind),
            grids=grids,
            samples=samples,
            keep_predictions=True,
        )
        for kind in CLASSIFIER_KINDS
    }
    table = aggregate_reports(reports)
    rules = derive_rule_table(table.mean_f)
    hybrid_folds = []
    for i, pair in enumerate(pairs):
        start = time.perf_counter()
        predictions = {k: reports[k].folds[i].prediction for k in CLASSIFIER_KINDS}
        fused = hybrid_segment(predictions, rules)
        runtime = time.perf_counter() - start
        hybrid_folds.append(
            FoldResult(
                fold=i,
                image_id=pair.id,
                scores=score_segmentation(fused, pair.labels),
                runtime_sec=runtime,
                prediction=fused,
            )
        )
    hybrid = EvalReport(classifier="hybrid", folds=hybrid_folds)
    return CompareResult(reports=reports, table=table, rules=rules, hybrid=hybrid)


def report_csv(reports: list[EvalReport]) -> str:
    """Deterministic CSV serialization of one or more reports."""
    lines = ["fold,classifier,tissue,tp,fp,fn,precision,recall,f_measure,degenerate"]
    for report in reports:
        for fr in report.folds:
            for tissue in Tissue:
                s = fr.scores[tissue]
                lines.append(
                    f"{fr.fold},{report.classifier},{TISSUE_NAMES[tissue]},"
                    f"{s.tp},{s.fp},{s.fn},"
                    f"{s.precision!r},{s.recall!r},{s.f_measure!r},"
                    f"{'true' if s.degenerate else 'false'}"
                )
    return "\n".join(lines) + "\n"


def summary_doc(reports: list[EvalReport], config: dict | None = None) -> dict:
    """JSON-ready summary: per-tissue and overall mean F per classifier."""
    table = aggregate_reports({r.classifier: r for r in reports})
    doc = {
        "classifiers": {
            kind: {
                "per_tissue_mean_f": {
                    TISSUE_NAMES[t]: table.mean_f[kind][t] for t in Tissue
                },
                "overall_mean_f": table.overall[kind],
                "fold_count": len(
                    next(r for r in reports if r.classifier == kind).folds
                ),
            }
            for kind in table.mean_f
        },
        "ranking": table.ranking,
        "folds": [
            {"fold": fr.fold, "image_id": fr.image_id} for fr in reports[0].folds
        ],
    }
    if config is not None:
        doc["config"] = config
    return doc


def timings_doc(reports: list[EvalReport]) -> dict:
    """Wall-clock sidecar (not covered by byte-reproducibility guarantees)."""
    return {
        "folds": [
            {"classifier": r.classifier, "fold": fr.fold, "runtime_sec": fr.runtime_sec}
            for r in reports
            for fr in r.folds
        ]
    }
