"""Per-tissue classifier assignment rules and hybrid label fusion.

``derive_rule_table`` assigns each tissue the classifier with the best mean
F-measure for it; ties go to the classifier with the higher overall mean F,
then to the fixed precedence svm > isnn > pnn > knn. The fallback classifier
is the best by overall mean F (same tie precedence).

``hybrid_segment`` fuses the four classifiers' label maps pixel by pixel: a
tissue is a candidate when its designated classifier predicted it at that
pixel; a single candidate wins outright, multiple candidates are resolved by
the higher designated score (lowest tissue code on exact ties), and a pixel
with no candidates takes the fallback classifier's label.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MissingCell, ModelLoadError
from .io import write_atomic
from .tissue import TISSUE_BY_NAME, TISSUE_NAMES, Tissue

# Fixed tie-break precedence, strongest first.
KIND_PRECEDENCE = ("svm", "isnn", "pnn", "knn")

_FORMAT = "brainseg-rules"
_VERSION = 1


@dataclass
class RuleTable:
    assignment: dict[Tissue, str]  # tissue -> designated classifier kind
    fallback: str
    scores: dict[str, dict[Tissue, float]]  # kind -> tissue -> mean F

    def to_dict(self) -> dict:
        return {
            "format": _FORMAT,
            "version": _VERSION,
            "assignment": {
                TISSUE_NAMES[t]: kind for t, kind in self.assignment.items()
            },
            "fallback": self.fallback,
            "scores": {
                kind: {TISSUE_NAMES[t]: f for t, f in per.items()}
                for kind, per in self.scores.items()
            },
        }

    @staticmethod
    def from_dict(doc: dict) -> "RuleTable":
        try:
            if doc.get("format") != _FORMAT:
                raise ModelLoadError(f"not a rule table document: {doc.get('format')!r}")
            assignment = {
                TISSUE_BY_NAME[name]: kind for name, kind in doc["assignment"].items()
            }
            scores = {
                kind: {TISSUE_BY_NAME[name]: float(f) for name, f in per.items()}
                for kind, per in doc["scores"].items()
            }
            table = RuleTable(assignment, doc["fallback"], scores)
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelLoadError(f"malformed rule table: {exc}") from None
        if set(table.assignment) != set(Tissue):
            raise ModelLoadError("rule table must assign every tissue")
        if table.fallback not in table.scores:
            raise ModelLoadError(f"fallback {table.fallback!r} has no score row")
        return table


def _precedence_key(kind: str) -> int:
    return KIND_PRECEDENCE.index(kind) if kind in KIND_PRECEDENCE else len(KIND_PRECEDENCE)


def derive_rule_table(scores: dict[str, dict[Tissue, float]]) -> RuleTable:
    """Build the assignment table from mean F per (classifier, tissue).

    ``scores`` must contain a value for every classifier/tissue cell.
    """
    if not scores:
        raise MissingCell("score matrix is empty")
    for kind, per in scores.items():
        missing = [TISSUE_NAMES[t] for t in Tissue if t not in per]
        if missing:
            raise MissingCell(f"classifier {kind!r} missing tissues {missing}")
    overall = {
        kind: sum(per[t] for t in Tissue) / len(Tissue) for kind, per in scores.items()
    }
    # Deterministic candidate order: precedence first, unknown kinds after.
    kinds = sorted(scores, key=lambda k: (_precedence_key(k), k))
    assignment = {}
    for tissue in Tissue:
        assignment[tissue] = max(
            kinds,
            key=lambda k: (scores[k][tissue], overall[k], -_precedence_key(k)),
        )
    fallback = max(kinds, key=lambda k: (overall[k], -_precedence_key(k)))
    return RuleTable(assignment=assignment, fallback=fallback, scores={
        kind: dict(per) for kind, per in scores.items()
    })


def hybrid_segment(predictions: dict[str, np.ndarray], rules: RuleTable) -> np.ndarray:
    """Fuse per-classifier label maps into one hybrid label map."""
    needed = set(rules.assignment.values()) | {rules.fallback}
    for kind in needed:
        if kind not in predictions:
            raise MissingCell(f"no prediction provided for classifier {kind!r}")
    shapes = {predictions[kind].shape for kind in needed}
    if len(shapes) != 1:
        raise DimensionMismatch(f"prediction maps disagree on shape: {shapes}")

    out = np.asarray(predictions[rules.fallback], dtype=np.uint8).copy()
    # Apply claims in ascending (score, then reversed-code) priority so the
    # highest designated score lands last; exact ties resolve to lowest code.
    order = sorted(
        Tissue, key=lambda t: (rules.scores[rules.assignment[t]][t], -int(t))
    )
    for tissue in order:
        claimed = predictions[rules.assignment[tissue]] == int(tissue)
        out[claimed] = int(tissue)
    return out


def save_rule_table(path: str | os.PathLike, rules: RuleTable,
                    config: dict | None = None) -> None:
    doc = rules.to_dict()
    if config is not None:
        doc["config"] = config
    write_atomic(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())


def load_rule_table(path: str | os.PathLike) -> RuleTable:
    from .errors import MissingFile

    if not os.path.isfile(path):
        raise MissingFile(f"no such file: {path}")
    try:
        doc = json.loads(open(path, "rb").read())
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"rule table is not valid JSON: {exc}") from None
    return RuleTable.from_dict(doc)
