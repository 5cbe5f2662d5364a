"""Class-map rendering to binary PPM (P6), dependency-free and bit-exact."""

import numpy as np

# 16 visually distinct colors; label 0 (unlabeled) always renders black.
CLASSIC16 = np.array([
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200),
    (245, 130, 48), (145, 30, 180), (70, 240, 240), (240, 50, 230),
    (210, 245, 60), (250, 190, 190), (0, 128, 128), (230, 190, 255),
    (170, 110, 40), (255, 250, 200), (128, 0, 0), (170, 255, 195),
], dtype=np.uint8)

PALETTES = {"classic16": CLASSIC16}

_SEPARATOR_RGB = (255, 255, 255)


def render_labels(labels: np.ndarray, palette: str = "classic16") -> np.ndarray:
    """rows x cols x 3 uint8 image of a label map."""
    colors = PALETTES.get(palette)
    if colors is None:
        raise ValueError(f"unknown palette '{palette}'")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 2:
        raise ValueError("label map must be 2-D")
    top = int(labels.max())
    if int(labels.min()) < 0 or top > len(colors):
        raise ValueError(f"label {top} outside palette range")
    lookup = np.vstack([np.zeros((1, 3), dtype=np.uint8), colors])
    return lookup[labels]


def side_by_side(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Join two rendered images with a one-pixel white separator column."""
    if left.shape[0] != right.shape[0]:
        raise ValueError("images differ in height")
    sep = np.full((left.shape[0], 1, 3), _SEPARATOR_RGB, dtype=np.uint8)
    return np.concatenate([left, sep, right], axis=1)


def ppm_bytes(image: np.ndarray) -> bytes:
    """Encode an rows x cols x 3 uint8 image as binary PPM (P6)."""
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError("image must be rows x cols x 3")
    h, w = image.shape[:2]
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image, dtype=np.uint8).tobytes()
