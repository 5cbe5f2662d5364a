"""Hyperspectral cubes and ground-truth maps: raw raster I/O, quantization,
train/test splits, and synthetic scene generation.

Cube files are headerless integer rasters described by a text sidecar
(key=value lines: bands, rows, cols, dtype, byteorder, interleave).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .infotheory import SymbolSequence

DTYPES = {"u8": "u1", "u16": "u2"}
BYTEORDERS = {"le": "<", "be": ">"}
INTERLEAVES = ("bsq", "bil", "bip")

DESCRIPTOR_KEYS = ("bands", "rows", "cols", "dtype", "byteorder", "interleave")


@dataclass
class CubeDescriptor:
    """Shape and encoding of a headerless raster file."""

    bands: int
    rows: int
    cols: int
    dtype: str = "u16"
    byteorder: str = "le"
    interleave: str = "bsq"

    def __post_init__(self):
        if min(self.bands, self.rows, self.cols) < 1:
            raise ValueError("raster dimensions must be positive")
        if self.dtype not in DTYPES:
            raise ValueError(f"unknown dtype '{self.dtype}'")
        if self.byteorder not in BYTEORDERS:
            raise ValueError(f"unknown byteorder '{self.byteorder}'")
        if self.interleave not in INTERLEAVES:
            raise ValueError(f"unknown interleave '{self.interleave}'")

    @property
    def numpy_dtype(self) -> np.dtype:
        return np.dtype(BYTEORDERS[self.byteorder] + DTYPES[self.dtype])

    @property
    def n_values(self) -> int:
        return self.bands * self.rows * self.cols


def read_descriptor(path) -> CubeDescriptor:
    fields = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise OSError(f"malformed descriptor line in {path}: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            fields[key] = value
    missing = [k for k in DESCRIPTOR_KEYS if k not in fields]
    if missing:
        raise OSError(f"descriptor {path} missing keys: {', '.join(missing)}")
    try:
        return CubeDescriptor(
            bands=int(fields["bands"]),
            rows=int(fields["rows"]),
            cols=int(fields["cols"]),
            dtype=fields["dtype"],
            byteorder=fields["byteorder"],
            interleave=fields["interleave"],
        )
    except ValueError as exc:
        raise OSError(f"invalid descriptor {path}: {exc}") from exc


def write_descriptor(path, desc: CubeDescriptor) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for key in DESCRIPTOR_KEYS:
            fh.write(f"{key}={getattr(desc, key)}\n")


@dataclass
class HyperCube:
    """Band-major stack of reflectance images, shape (bands, rows, cols)."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 3:
            raise ValueError("cube data must be 3-D (bands, rows, cols)")
        if min(self.data.shape) < 1:
            raise ValueError("cube dimensions must be positive")
        if np.issubdtype(self.data.dtype, np.signedinteger) and (self.data < 0).any():
            raise ValueError("reflectance values must be non-negative")

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]


@dataclass
class GroundTruth:
    """Per-pixel class labels; 0 marks an unlabeled pixel."""

    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 2:
            raise ValueError("ground truth must be 2-D")
        if self.n_classes < 1:
            raise ValueError("class count must be positive")
        top = int(self.labels.max())
        if int(self.labels.min()) < 0 or top > self.n_classes:
            raise ValueError(f"label {top} exceeds class count {self.n_classes}")
        if top == 0:
            raise ValueError("no labeled pixels")

    @property
    def rows(self) -> int:
        return self.labels.shape[0]

    @property
    def cols(self) -> int:
        return self.labels.shape[1]

    def labeled_indices(self) -> np.ndarray:
        """Sorted flat indices (row-major) of the labeled pixels."""
        return np.flatnonzero(self.labels.ravel() > 0)


@dataclass
class PixelSplit:
    """Disjoint train/test partition of the labeled pixels (flat indices)."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int

    def __post_init__(self):
        self.train_indices = np.asarray(self.train_indices, dtype=np.int64)
        self.test_indices = np.asarray(self.test_indices, dtype=np.int64)


def load_cube(path, desc: CubeDescriptor) -> HyperCube:
    """Read a headerless raster into band-major order, any interleave."""
    raw = np.fromfile(path, dtype=desc.numpy_dtype)
    if raw.size != desc.n_values:
        raise OSError("file length does not match descriptor")
    if desc.interleave == "bsq":
        data = raw.reshape(desc.bands, desc.rows, desc.cols)
    elif desc.interleave == "bil":
        data = raw.reshape(desc.rows, desc.bands, desc.cols).transpose(1, 0, 2)
    else:  # bip
        data = raw.reshape(desc.rows, desc.cols, desc.bands).transpose(2, 0, 1)
    native = np.dtype(DTYPES[desc.dtype])
    return HyperCube(np.ascontiguousarray(data).astype(native))


def save_cube(cube: HyperCube, path, desc: CubeDescriptor) -> None:
    """Write a cube as a headerless raster in the descriptor's layout."""
    if (desc.bands, desc.rows, desc.cols) != cube.data.shape:
        raise ValueError("descriptor shape does not match cube")
    if desc.interleave == "bsq":
        data = cube.data
    elif desc.interleave == "bil":
        data = cube.data.transpose(1, 0, 2)
    else:  # bip
        data = cube.data.transpose(1, 2, 0)
    np.ascontiguousarray(data).astype(desc.numpy_dtype).tofile(path)


def load_label_raster(path, rows: int, cols: int, dtype: str = "u8",
                      byteorder: str = "le") -> np.ndarray:
    """Read a headerless row-major label raster without label validation."""
    if dtype not in DTYPES:
        raise ValueError(f"unknown dtype '{dtype}'")
    if byteorder not in BYTEORDERS:
        raise ValueError(f"unknown byteorder '{byteorder}'")
    raw = np.fromfile(path, dtype=np.dtype(BYTEORDERS[byteorder] + DTYPES[dtype]))
    if raw.size != rows * cols:
        raise OSError("file length does not match descriptor")
    return raw.reshape(rows, cols).astype(np.int64)


def load_gt(path, rows: int, cols: int, n_classes: int = 16,
            dtype: str = "u8", byteorder: str = "le") -> GroundTruth:
    """Read and validate a ground-truth map (labels in [0, n_classes])."""
    labels = load_label_raster(path, rows, cols, dtype=dtype, byteorder=byteorder)
    return GroundTruth(labels, n_classes)


def save_labels(labels: np.ndarray, path, dtype: str = "u8",
                byteorder: str = "le") -> None:
    np.ascontiguousarray(labels).astype(
        np.dtype(BYTEORDERS[byteorder] + DTYPES[dtype])).tofile(path)


def random_split(gt: GroundTruth, train_fraction: float, seed: int) -> PixelSplit:
    """Unstratified random partition of the labeled pixels.

    Train size rounds half-up from train_fraction * n_labeled; the test set
    is the complement.  Deterministic for a fixed seed.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train fraction must lie in (0, 1)")
    labeled = gt.labeled_indices()
    n_train = int(train_fraction * labeled.size + 0.5)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(labeled.size)
    train = np.sort(labeled[perm[:n_train]])
    test = np.sort(labeled[perm[n_train:]])
    return PixelSplit(train, test, seed)


def _quantize(values: np.ndarray, vmin: float, vmax: float, n_bins: int) -> np.ndarray:
    if vmax == vmin:
        return np.zeros(values.shape, dtype=np.int64)
    codes = np.floor((values - vmin) * n_bins / (vmax - vmin)).astype(np.int64)
    return np.clip(codes, 0, n_bins - 1)


def quantize_band(cube: HyperCube, band_index: int, n_bins: int,
                  pixels: Optional[np.ndarray] = None) -> SymbolSequence:
    """Equal-width quantization of one band over its own min/max.

    ``pixels`` restricts the emitted sequence to the given flat indices
    (e.g. the labeled pixels); binning edges always come from the full band.
    """
    if not 1 <= n_bins <= 65536:
        raise ValueError("bin count must lie in [1, 65536]")
    if not 0 <= band_index < cube.bands:
        raise ValueError(f"band index {band_index} out of range")
    band = cube.data[band_index].astype(np.float64)
    vmin = float(band.min())
    vmax = float(band.max())
    values = band.ravel() if pixels is None else band.ravel()[pixels]
    return SymbolSequence(_quantize(values, vmin, vmax, n_bins), n_bins)


def quantize_map(values: np.ndarray, n_bins: int,
                 pixels: Optional[np.ndarray] = None) -> SymbolSequence:
    """Equal-width quantization of a real-valued 2-D map (same rule as bands)."""
    if not 1 <= n_bins <= 65536:
        raise ValueError("bin count must lie in [1, 65536]")
    values = np.asarray(values, dtype=np.float64)
    vmin = float(values.min())
    vmax = float(values.max())
    flat = values.ravel() if pixels is None else values.ravel()[pixels]
    return SymbolSequence(_quantize(flat, vmin, vmax, n_bins), n_bins)


def approximate_gt(cube: HyperCube, band_start: int, band_stop: int) -> np.ndarray:
    """Per-pixel mean over an inclusive band range, as a rows x cols map.

    Stands in for the ground truth when none is available; its quantization
    feeds the same mutual-information machinery as a real map.
    """
    if band_start > band_stop:
        raise ValueError("empty band range")
    if band_start < 0 or band_stop >= cube.bands:
        raise ValueError("band range out of bounds")
    return cube.data[band_start:band_stop + 1].astype(np.float64).mean(axis=0)


@dataclass
class SynthSpec:
    """Recipe for a desk-scale synthetic scene with planted redundancy."""

    n_classes: int
    rows: int
    cols: int
    informative_bands: int
    copies_per_informative: int
    noise_bands: int
    noise_level: float
    seed: int

    def __post_init__(self):
        if self.informative_bands < 1:
            raise ValueError("need at least one informative band")
        if min(self.copies_per_informative, self.noise_bands) < 0:
            raise ValueError("band counts must be non-negative")
        if self.noise_level < 0:
            raise ValueError("noise level must be non-negative")
        if self.n_classes < 2:
            raise ValueError("need at least two classes")
        if min(self.rows, self.cols) < 1:
            raise ValueError("scene dimensions must be positive")


@dataclass
class BandRole:
    """Provenance of one synthetic band."""

    band: int
    role: str  # informative | copy | noise
    source: Optional[int] = None  # original band index for copies


_LEVEL_BASE = 1000.0
_LEVEL_GAP = 400.0
_UNLABELED_FRACTION = 0.05
_NOISE_LEVELS = 32


def synth_cube(spec: SynthSpec):
    """Generate (HyperCube, GroundTruth, list[BandRole]) from a SynthSpec.

    Informative bands render the class structure through per-band random
    level permutations plus Gaussian noise of ``noise_level * level gap``.
    Copy bands are an informative band plus small independent noise; noise
    bands are label-independent draws from a 32-level palette.
    """
    rng = np.random.default_rng(spec.seed)
    n_px = spec.rows * spec.cols

    # blocky class map: nearest of n_classes seed pixels
    seeds = rng.choice(n_px, size=spec.n_classes, replace=False)
    sr, sc = np.divmod(seeds, spec.cols)
    rr, cc = np.divmod(np.arange(n_px), spec.cols)
    d2 = (rr[:, None] - sr[None, :]) ** 2 + (cc[:, None] - sc[None, :]) ** 2
    full_labels = d2.argmin(axis=1) + 1

    labels = full_labels.copy()
    n_unlabeled = int(_UNLABELED_FRACTION * n_px)
    if n_unlabeled:
        labels[rng.choice(n_px, size=n_unlabeled, replace=False)] = 0

    spread = _LEVEL_GAP * max(spec.n_classes - 1, 1)
    sigma = spec.noise_level * _LEVEL_GAP
    copy_sigma = max(1.0, 0.05 * sigma)

    bands = []
    roles = []

    def add(values, role, source=None):
        roles.append(BandRole(len(bands), role, source))
        bands.append(np.clip(np.rint(values), 0, 65535).astype(np.uint16))

    for i in range(spec.informative_bands):
        perm = rng.permutation(spec.n_classes)
        clean = _LEVEL_BASE + _LEVEL_GAP * perm[full_labels - 1]
        original = clean + rng.normal(0.0, sigma, n_px)
        source_index = len(bands)
        add(original, "informative")
        for _ in range(spec.copies_per_informative):
            add(bands[source_index].astype(np.float64)
                + rng.normal(0.0, copy_sigma, n_px), "copy", source_index)

    for _ in range(spec.noise_bands):
        levels = rng.uniform(_LEVEL_BASE, _LEVEL_BASE + spread, _NOISE_LEVELS)
        add(levels[rng.integers(0, _NOISE_LEVELS, n_px)], "noise")

    data = np.stack(bands).reshape(len(bands), spec.rows, spec.cols)
    gt = GroundTruth(labels.reshape(spec.rows, spec.cols), spec.n_classes)
    return HyperCube(data), gt, roles


def band_roles_csv(roles) -> str:
    """Serialize band roles as text (band,role,source; source empty unless copy)."""
    lines = ["band,role,source"]
    for r in roles:
        src = "" if r.source is None else str(r.source)
        lines.append(f"{r.band},{r.role},{src}")
    return "\n".join(lines) + "\n"
