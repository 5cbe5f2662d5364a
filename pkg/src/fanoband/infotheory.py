"""Discrete information measures over quantized symbol sequences.

Entropies are plug-in (maximum likelihood) estimates from count tables,
always in bits.  Sums use ``math.fsum`` so that results are independent of
summation order; in particular mutual information is bit-identical under
transposition of the joint table.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class SymbolSequence:
    """Integer-coded observations of one discrete variable.

    ``symbols`` holds non-negative codes, all strictly below
    ``alphabet_size``.  The sequence must be non-empty.
    """

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64).ravel()
        if self.symbols.size == 0:
            raise ValueError("empty input")
        if self.alphabet_size < 1:
            raise ValueError("alphabet size must be positive")
        if int(self.symbols.min()) < 0 or int(self.symbols.max()) >= self.alphabet_size:
            raise ValueError("symbol code out of range")

    def __len__(self) -> int:
        return int(self.symbols.size)


@dataclass
class JointHistogram:
    """Count matrix of paired symbol observations, indexed (code_a, code_b)."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2:
            raise ValueError("joint histogram must be a 2-D count matrix")
        if (self.counts < 0).any():
            raise ValueError("negative count")
        if int(self.counts.sum()) != self.total:
            raise ValueError("total does not match counts")
        if self.total <= 0:
            raise ValueError("empty distribution")

    def transpose(self) -> "JointHistogram":
        return JointHistogram(self.counts.T.copy(), self.total)


@dataclass
class FanoBounds:
    """Error-probability interval derived from a conditional entropy."""

    lower: float
    upper: float
    h_c_given_x: float
    n_classes: int


def histogram1d(seq: SymbolSequence) -> np.ndarray:
    """Count vector of length ``alphabet_size``; sums to the sequence length."""
    return np.bincount(seq.symbols, minlength=seq.alphabet_size)


def joint_histogram(a: SymbolSequence, b: SymbolSequence) -> JointHistogram:
    """Joint count matrix of two paired sequences."""
    if len(a) != len(b):
        raise ValueError("paired sequences differ in length")
    flat = a.symbols * b.alphabet_size + b.symbols
    counts = np.bincount(flat, minlength=a.alphabet_size * b.alphabet_size)
    counts = counts.reshape(a.alphabet_size, b.alphabet_size)
    return JointHistogram(counts, len(a))


def entropy(counts) -> float:
    """Shannon entropy in bits of a count vector (any shape; flattened).

    Zero-count cells contribute nothing.  Raises on an all-zero table.
    """
    counts = np.asarray(counts).ravel()
    if (counts < 0).any():
        raise ValueError("negative count")
    total = float(counts.sum())
    if total <= 0:
        raise ValueError("empty distribution")
    pos = counts[counts > 0]
    return math.fsum(-(c / total) * math.log2(c / total) for c in pos)


def mutual_information(joint: JointHistogram) -> float:
    """Mutual information in bits of a joint count matrix.

    I = sum over positive cells of p(a,b) * log2( p(a,b) / (p(a) p(b)) ).
    """
    counts = joint.counts
    total = float(joint.total)
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    terms = []
    for i, j in zip(*np.nonzero(counts)):
        p = counts[i, j] / total
        pa = row[i] / total
        pb = col[j] / total
        terms.append(p * math.log2(p / (pa * pb)))
    return math.fsum(terms)


def conditional_entropy(c: SymbolSequence, x: SymbolSequence) -> float:
    """H(C|X) = H(C,X) - H(X) in bits, over paired sequences."""
    joint = joint_histogram(c, x)
    h_cx = entropy(joint.counts)
    h_x = entropy(joint.counts.sum(axis=0))
    h = h_cx - h_x
    # mathematically >= 0; guard the last-ulp cancellation case
    return h if h > 0.0 else 0.0


def fano_bounds(h_c_given_x: float, n_classes: int) -> FanoBounds:
    """Fano error-probability interval for a conditional entropy in bits.

    lower = (H - 1) / log2(Nc) clamped into [0, 1]; upper = H itself
    (conditional entropy expressed in bits).
    """
    if n_classes < 2:
        raise ValueError("Fano bound undefined")
    if h_c_given_x < 0:
        raise ValueError("conditional entropy must be non-negative")
    lower = (h_c_given_x - 1.0) / math.log2(n_classes)
    lower = min(1.0, max(0.0, lower))
    return FanoBounds(lower=lower, upper=h_c_given_x,
                      h_c_given_x=h_c_given_x, n_classes=n_classes)


def pe_score(h_c_given_x: float, n_classes: int) -> float:
    """Width of the Fano interval; the acceptance score of the selection loop.

    Non-negative and non-decreasing in the conditional entropy.
    """
    b = fano_bounds(h_c_given_x, n_classes)
    return b.upper - b.lower
