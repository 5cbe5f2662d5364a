"""Pluggable pixel classifiers, estimated-map construction, and accuracy reports.

The built-in classifiers are deterministic and dependency-free: a nearest
centroid and a k-nearest-neighbors classifier, both on per-feature
standardized reflectances with ties broken toward the lowest class id.
Anything with fit/predict can be plugged in through the same protocol
(e.g. an external SVM via an ``import:`` spec).
"""

import importlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cube import GroundTruth, HyperCube, PixelSplit


class NearestCentroid:
    """Assign each sample to the class with the nearest (Euclidean) centroid."""

    def fit(self, X, y):
        self.classes_ = np.unique(y)
        self.centroids_ = np.stack([X[y == c].mean(axis=0) for c in self.classes_])
        return self

    def predict(self, X):
        if X.shape[0] == 0:
            return np.empty(0, dtype=self.classes_.dtype)
        d2 = ((X[:, None, :] - self.centroids_[None, :, :]) ** 2).sum(axis=2)
        # classes_ is sorted, so argmin's first-hit rule breaks ties low
        return self.classes_[d2.argmin(axis=1)]


class KNearestNeighbors:
    """k-NN on Euclidean distance; vote ties and distance ties break low."""

    def __init__(self, k: int = 1):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k

    def fit(self, X, y):
        self.X_ = X
        self.y_ = np.asarray(y)
        self.n_classes_ = int(self.y_.max()) + 1
        return self

    def predict(self, X):
        out = np.empty(X.shape[0], dtype=self.y_.dtype)
        k = min(self.k, self.y_.size)
        for i, x in enumerate(X):
            d2 = ((self.X_ - x) ** 2).sum(axis=1)
            # order by distance, then label, so equidistant neighbors are
            # taken lowest-class-first regardless of sample order
            nearest = self.y_[np.lexsort((self.y_, d2))[:k]]
            out[i] = np.bincount(nearest, minlength=self.n_classes_).argmax()
        return out


def make_classifier(spec):
    """Resolve a classifier spec to a fresh classifier instance.

    Specs: "centroid", "knn", "knn:<k>", "import:<module>:<factory>", or a
    zero-argument callable returning an object with fit/predict.
    """
    if callable(spec):
        return spec()
    if not isinstance(spec, str):
        raise ValueError(f"unknown classifier spec {spec!r}")
    if spec == "centroid":
        return NearestCentroid()
    if spec == "knn":
        return KNearestNeighbors(1)
    if spec.startswith("knn:"):
        try:
            return KNearestNeighbors(int(spec.split(":", 1)[1]))
        except ValueError as exc:
            raise ValueError(f"bad k in classifier spec '{spec}'") from exc
    if spec.startswith("import:"):
        try:
            _, module, attr = spec.split(":", 2)
        except ValueError as exc:
            raise ValueError(f"plug-in spec must be 'import:<module>:<factory>', got '{spec}'") from exc
        factory = getattr(importlib.import_module(module), attr)
        return factory()
    raise ValueError(f"unknown classifier spec '{spec}'")


@dataclass
class TrainedModel:
    """A fitted classifier plus its feature scaling and the bands it was trained on."""

    classifier: object
    mean: np.ndarray
    std: np.ndarray
    bands: Optional[tuple]
    classes: np.ndarray

    @property
    def n_features(self) -> int:
        return self.mean.size


def train(classifier_spec, features, labels, bands=None,
          classes: Optional[Sequence[int]] = None) -> TrainedModel:
    """Standardize features on the training set and fit a classifier.

    Raises if any expected class has no training sample, or if the training
    labels collapse to a single class.  Zero-variance features keep a unit
    divisor so constant bands cannot produce NaNs.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError("feature matrix must be 2-D with at least one column")
    if X.shape[0] != y.size:
        raise ValueError("feature rows and labels differ in length")
    if not np.isfinite(X).all():
        raise ValueError("non-finite feature value")
    present = np.unique(y)
    if classes is not None:
        missing = sorted(set(int(c) for c in classes) - set(present.tolist()))
        if missing:
            raise ValueError(
                "no training samples for class "
                + ", ".join(str(c) for c in missing))
    if present.size < 2:
        raise ValueError("training labels contain a single class")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    clf = make_classifier(classifier_spec)
    clf.fit((X - mean) / std, y)
    return TrainedModel(clf, mean, std,
                        None if bands is None else tuple(int(b) for b in bands),
                        present)


def predict(model: TrainedModel, features) -> np.ndarray:
    """Predict one label per row; feature width must match the trained bands."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError("feature width does not match trained band list")
    if X.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    return np.asarray(model.classifier.predict((X - model.mean) / model.std),
                      dtype=np.int64)


@dataclass
class EstimatedMap:
    """Predicted class per labeled pixel, aligned with ground-truth indexing."""

    pixel_indices: np.ndarray  # sorted flat indices of the labeled pixels
    labels: np.ndarray         # predicted class per pixel, in [1, n_classes]
    rows: int
    cols: int
    n_classes: int

    def to_full_map(self) -> np.ndarray:
        """rows x cols label image, 0 on unlabeled pixels."""
        flat = np.zeros(self.rows * self.cols, dtype=np.int64)
        flat[self.pixel_indices] = self.labels
        return flat.reshape(self.rows, self.cols)


def band_features(cube: HyperCube, bands, pixels: np.ndarray) -> np.ndarray:
    """n_pixels x n_bands reflectance matrix at the given flat pixel indices."""
    idx = [int(b) for b in bands]
    return cube.data.reshape(cube.bands, -1)[idx][:, pixels].T.astype(np.float64)


def build_estimated_map(cube: HyperCube, gt: GroundTruth, bands,
                        split: PixelSplit, classifier_spec) -> EstimatedMap:
    """Train on the split's training pixels restricted to ``bands`` and
    predict every labeled pixel (train and test alike)."""
    bands = [int(b) for b in bands]
    if not bands:
        raise ValueError("no bands selected")
    if (cube.rows, cube.cols) != (gt.rows, gt.cols):
        raise ValueError("cube and ground truth differ in spatial dimensions")
    labeled = gt.labeled_indices()
    y_all = gt.labels.ravel()[labeled]
    feats_all = band_features(cube, bands, labeled)
    train_pos = np.searchsorted(labeled, split.train_indices)
    model = train(classifier_spec, feats_all[train_pos], y_all[train_pos],
                  bands=bands, classes=np.unique(y_all))
    pred = predict(model, feats_all)
    return EstimatedMap(labeled, pred, gt.rows, gt.cols, gt.n_classes)


@dataclass
class ClassAccuracy:
    class_id: int
    pixels: int
    accuracy_pct: float


@dataclass
class EvaluationReport:
    """Overall and per-class accuracy of an estimated map over one scope."""

    overall_pct: float
    per_class: list
    confusion: np.ndarray  # true class x predicted class counts
    scope: str
    n_evaluated: int


def evaluate(c_est: EstimatedMap, gt: GroundTruth, split: PixelSplit,
             scope: str = "test") -> EvaluationReport:
    """Score an estimated map against the ground truth.

    scope "test" restricts to the split's test pixels; "all" scores every
    labeled pixel.
    """
    if scope not in ("test", "all"):
        raise ValueError(f"unknown scope '{scope}'")
    if scope == "test":
        keep = np.isin(c_est.pixel_indices, split.test_indices)
    else:
        keep = np.ones(c_est.pixel_indices.size, dtype=bool)
    true = gt.labels.ravel()[c_est.pixel_indices[keep]]
    pred = c_est.labels[keep]
    n = gt.n_classes
    confusion = np.zeros((n, n), dtype=np.int64)
    np.add.at(confusion, (true - 1, pred - 1), 1)
    total = int(confusion.sum())
    correct = int(np.trace(confusion))
    overall = 100.0 * correct / total if total else 0.0
    per_class = []
    for c in range(1, n + 1):
        count = int(confusion[c - 1].sum())
        hit = int(confusion[c - 1, c - 1])
        pct = 100.0 * hit / count if count else 0.0
        per_class.append(ClassAccuracy(c, count, pct))
    return EvaluationReport(overall, per_class, confusion, scope, total)


def report_to_csv(report: EvaluationReport) -> str:
    """Per-class CSV, accuracies to two decimals (header class,pixels,accuracy_pct)."""
    lines = ["class,pixels,accuracy_pct"]
    for row in report.per_class:
        lines.append(f"{row.class_id},{row.pixels},{row.accuracy_pct:.2f}")
    return "\n".join(lines) + "\n"
