"""Band selection: mutual-information ranking and the Fano-score wrapper loop.

The wrapper walks the MI ranking once.  Each candidate band is tentatively
added to the selected set, an estimated map is built by the classifier, and
the candidate is kept only if the resulting error-probability score drops by
at least the threshold below the best accepted score so far.
"""

from dataclasses import dataclass, field
from typing import Optional

from .classify import build_estimated_map, evaluate
from .cube import GroundTruth, HyperCube, PixelSplit, quantize_band
from .infotheory import (SymbolSequence, conditional_entropy, joint_histogram,
                         mutual_information, pe_score)


def mi_curve(cube: HyperCube, reference: SymbolSequence, n_bins: int,
             pixels=None):
    """MI of every band against a reference sequence, ranked descending.

    ``pixels`` restricts the comparison to the given flat indices; ties rank
    the lower band index first.  Returns a list of (band_index, mi_bits).
    """
    entries = []
    for band in range(cube.bands):
        x_seq = quantize_band(cube, band, n_bins, pixels=pixels)
        entries.append((band, mutual_information(joint_histogram(x_seq, reference))))
    return sorted(entries, key=lambda e: (-e[1], e[0]))


def mi_ranking(cube: HyperCube, gt: GroundTruth, n_bins: int):
    """All bands ordered by descending MI with the ground truth.

    MI is estimated over labeled pixels only.
    """
    if (cube.rows, cube.cols) != (gt.rows, gt.cols):
        raise ValueError("cube and ground truth differ in spatial dimensions")
    labeled = gt.labeled_indices()
    c_seq = SymbolSequence(gt.labels.ravel()[labeled], gt.n_classes + 1)
    return mi_curve(cube, c_seq, n_bins, pixels=labeled)


@dataclass
class SelectionConfig:
    """Knobs of the wrapper loop (threshold may be negative or -inf)."""

    threshold: float
    max_bands: int
    n_bins: int = 256
    classifier_spec: object = "centroid"
    initial_pe: Optional[float] = None  # None: first band sets the bar unconditionally

    def __post_init__(self):
        if self.max_bands < 1:
            raise ValueError("max bands must be at least 1")


@dataclass
class TraceStep:
    step: int
    band: int
    mi_bits: float
    pe_after: float
    accepted: bool


@dataclass
class SelectionTrace:
    """Full audit of one wrapper run."""

    steps: list = field(default_factory=list)
    selected: list = field(default_factory=list)
    rejected: list = field(default_factory=list)


def _map_pe(c_est, gt: GroundTruth) -> float:
    """Fano score of an estimated map against the ground truth (all labeled pixels)."""
    alphabet = gt.n_classes + 1
    c_seq = SymbolSequence(gt.labels.ravel()[c_est.pixel_indices], alphabet)
    x_seq = SymbolSequence(c_est.labels, alphabet)
    return pe_score(conditional_entropy(c_seq, x_seq), gt.n_classes)


def wrapper_select(cube: HyperCube, gt: GroundTruth, split: PixelSplit,
                   config: SelectionConfig, ranking=None) -> SelectionTrace:
    """Greedy wrapper selection driven by the error-probability score.

    Candidates are consumed in static MI order, never revisited.  With no
    explicit initial score, the top-MI band is accepted unconditionally and
    its score becomes the bar; afterwards a candidate is kept only when its
    score is at most (best score - threshold), which then becomes the new
    bar.  Stops at max_bands or when the candidate list is exhausted.

    A precomputed ``ranking`` (as returned by mi_ranking) skips the MI pass.
    """
    if config.max_bands > cube.bands:
        raise ValueError("max bands exceeds band count")
    if ranking is None:
        ranking = mi_ranking(cube, gt, config.n_bins)
    trace = SelectionTrace()
    best_pe = config.initial_pe
    for step, (band, mi_bits) in enumerate(ranking, start=1):
        if len(trace.selected) >= config.max_bands:
            break
        candidate = trace.selected + [band]
        c_est = build_estimated_map(cube, gt, candidate, split,
                                    config.classifier_spec)
        pe = _map_pe(c_est, gt)
        if best_pe is None:
            accepted = True  # top-MI band initializes the selected set
        else:
            accepted = pe <= best_pe - config.threshold
        if accepted:
            trace.selected.append(band)
            best_pe = pe
        else:
            trace.rejected.append(band)
        trace.steps.append(TraceStep(step, band, mi_bits, pe, accepted))
    return trace


@dataclass
class SweepTable:
    """Test accuracy per (threshold, band-count checkpoint); None = never reached."""

    thresholds: list
    checkpoints: list
    cells: dict          # (threshold, checkpoint) -> float | None
    traces: dict         # threshold -> SelectionTrace


def threshold_sweep(cube: HyperCube, gt: GroundTruth, split: PixelSplit,
                    thresholds, checkpoints, n_bins: int = 256,
                    classifier_spec: object = "centroid",
                    ranking=None) -> SweepTable:
    """Run the wrapper once per threshold and score band-count checkpoints.

    Each run targets max(checkpoints) bands; a checkpoint the run never
    reaches stays empty, mirroring the dashes of a sweep table.
    """
    thresholds = list(thresholds)
    checkpoints = sorted(int(c) for c in checkpoints)
    if not thresholds:
        raise ValueError("no thresholds given")
    if not checkpoints or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive band counts")
    if ranking is None:
        ranking = mi_ranking(cube, gt, n_bins)
    cells = {}
    traces = {}
    for th in thresholds:
        config = SelectionConfig(threshold=th, max_bands=checkpoints[-1],
                                 n_bins=n_bins, classifier_spec=classifier_spec)
        trace = wrapper_select(cube, gt, split, config, ranking=ranking)
        traces[th] = trace
        for ckpt in checkpoints:
            if len(trace.selected) >= ckpt:
                c_est = build_estimated_map(cube, gt, trace.selected[:ckpt],
                                            split, classifier_spec)
                cells[(th, ckpt)] = evaluate(c_est, gt, split, "test").overall_pct
            else:
                cells[(th, ckpt)] = None
    return SweepTable(thresholds, checkpoints, cells, traces)


def ranking_to_csv(ranking, by: str = "band") -> str:
    """MI ranking as CSV, ordered by band index or by rank."""
    if by == "band":
        rows = sorted(ranking, key=lambda e: e[0])
    elif by == "rank":
        rows = list(ranking)
    else:
        raise ValueError(f"unknown ordering '{by}'")
    lines = ["band,mi_bits"]
    lines.extend(f"{band},{mi!r}" for band, mi in rows)
    return "\n".join(lines) + "\n"


def trace_to_csv(trace: SelectionTrace) -> str:
    lines = ["step,band,mi_bits,pe,accepted"]
    for s in trace.steps:
        flag = "true" if s.accepted else "false"
        lines.append(f"{s.step},{s.band},{s.mi_bits!r},{s.pe_after!r},{flag}")
    return "\n".join(lines) + "\n"


def sweep_to_csv(table: SweepTable) -> str:
    """Checkpoint rows x threshold columns, unreached cells empty."""
    header = "bands_retained," + ",".join(repr(float(t)) for t in table.thresholds)
    lines = [header]
    for ckpt in table.checkpoints:
        cells = []
        for th in table.thresholds:
            acc = table.cells[(th, ckpt)]
            cells.append("" if acc is None else f"{acc:.2f}")
        lines.append(f"{ckpt}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def sweep_to_long_csv(table: SweepTable) -> str:
    """One row per realized (threshold, checkpoint) point."""
    lines = ["threshold,n_bands,accuracy_pct"]
    for th in table.thresholds:
        for ckpt in table.checkpoints:
            acc = table.cells[(th, ckpt)]
            if acc is not None:
                lines.append(f"{float(th)!r},{ckpt},{acc:.2f}")
    return "\n".join(lines) + "\n"
