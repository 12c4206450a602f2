"""Brain MR segmentation toolkit: Gabor texture features, four classifiers
trained on sampled pixels, leave-one-out evaluation, and rule-based fusion of
the per-classifier segmentations.
"""

from .errors import (
    BrainsegError,
    ConvergenceWarning,
    CorruptHeader,
    DimensionMismatch,
    DuplicateId,
    EmptyDataset,
    InsufficientPixels,
    InvalidConfig,
    InvalidK,
    MissingCell,
    MissingFile,
    ModelLoadError,
    OutOfRangeLabel,
    SegmentationError,
    UnknownClass,
    UnsupportedFormat,
)
from .tissue import OVERLAY_PALETTE, TISSUE_NAMES, TISSUES, Tissue
from .rng import Xoshiro256PP, derive_seed
from .gabor import (
    DEFAULT_FREQUENCIES,
    DEFAULT_ORIENTATIONS_DEG,
    FEATURE_DIM,
    FeatureScaler,
    GaborConfig,
    build_filter_bank,
    convolve_response,
    extract_features,
)
from .phantom import DEFAULT_TISSUE_MEANS, PhantomConfig, generate_phantom
from .sampling import TrainingSet, sample_training_points
from .classifiers import CLASSIFIER_KINDS, make_classifier, segment_image
from .classifiers.pnn import PnnClassifier
from .classifiers.knn import KnnClassifier
from .classifiers.isnn import IsnnClassifier
from .classifiers.svm import SvmClassifier
from .metrics import TissueScore, confusion_counts, score_segmentation, score_tissue
from .fusion import RuleTable, derive_rule_table, hybrid_segment
from .evaluation import (
    ComparisonTable,
    CompareResult,
    EvalReport,
    FoldResult,
    compare_classifiers,
    run_loocv,
)
from .models import load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "BrainsegError",
    "ConvergenceWarning",
    "CorruptHeader",
    "DimensionMismatch",
    "DuplicateId",
    "EmptyDataset",
    "InsufficientPixels",
    "InvalidConfig",
    "InvalidK",
    "MissingCell",
    "MissingFile",
    "ModelLoadError",
    "OutOfRangeLabel",
    "SegmentationError",
    "UnknownClass",
    "UnsupportedFormat",
    "Tissue",
    "TISSUES",
    "TISSUE_NAMES",
    "OVERLAY_PALETTE",
    "Xoshiro256PP",
    "derive_seed",
    "DEFAULT_FREQUENCIES",
    "DEFAULT_ORIENTATIONS_DEG",
    "FEATURE_DIM",
    "FeatureScaler",
    "GaborConfig",
    "build_filter_bank",
    "convolve_response",
    "extract_features",
    "DEFAULT_TISSUE_MEANS",
    "PhantomConfig",
    "generate_phantom",
    "TrainingSet",
    "sample_training_points",
    "CLASSIFIER_KINDS",
    "make_classifier",
    "segment_image",
    "PnnClassifier",
    "KnnClassifier",
    "IsnnClassifier",
    "SvmClassifier",
    "TissueScore",
    "confusion_counts",
    "score_segmentation",
    "score_tissue",
    "RuleTable",
    "derive_rule_table",
    "hybrid_segment",
    "ComparisonTable",
    "CompareResult",
    "EvalReport",
    "FoldResult",
    "compare_classifiers",
    "run_loocv",
    "load_model",
    "save_model",
    "__version__",
]
