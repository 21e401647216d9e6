"""Connected clusters of the graph of a picture: pixels are vertices, same-coloured pixels sharing a side are joined.

Only 4-connectivity is supported; diagonal contacts never join clusters."""
import logging

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..models.images import BLACK, BinaryImage, Color
from ._kernels import component_kernel, find_at_least_kernel, label_kernel, max_cluster_kernel

BBox = tuple[int, int, int, int]
CLUSTER_FIELDS = ["label", "size", "min_row", "min_col", "max_row", "max_col"]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Cluster:
    """One cluster; 'pixels' holds (row, col) pairs in raster order when pixel storage was requested."""

    id: int
    size: int
    bbox: BBox
    pixels: Optional[np.ndarray] = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cluster):
            return False

        same_pixels = (self.pixels is None and other.pixels is None) or (
            self.pixels is not None and other.pixels is not None and np.array_equal(self.pixels, other.pixels)
        )
        return (self.id, self.size, self.bbox) == (other.id, other.size, other.bbox) and same_pixels


@dataclass(frozen=True, eq=False)
class ClusterLabeling:
    """Row-major label plane (0 = not the selected colour) and the clusters it describes."""

    labels: np.ndarray
    clusters: tuple[Cluster, ...]
    color: Color = BLACK

    @property
    def sizes(self) -> np.ndarray:
        return np.array([c.size for c in self.clusters], dtype=np.int64)


def _split_pixels(labels: np.ndarray, sizes: np.ndarray) -> list[np.ndarray]:
    """Group pixel coordinates by label, raster order inside each group."""
    flat = labels.ravel()
    selected = np.flatnonzero(flat)
    order = selected[np.argsort(flat[selected], kind="stable")]
    rows, cols = np.divmod(order, labels.shape[1])
    coords = np.stack([rows, cols], axis=1)
    return np.split(coords, np.cumsum(sizes)[:-1]) if len(sizes) else []


def label_components(image: BinaryImage, color: Color | int = BLACK, store_pixels: bool = False) -> ClusterLabeling:
    """Label every cluster of one colour, labels assigned in raster discovery order from 1.
    :param image: binary picture
    :param color: colour whose clusters are labelled
    :param store_pixels: also keep the coordinates of each cluster's pixels"""
    color = Color(color)
    labels, sizes, boxes = label_kernel(image.bits, int(color))
    sizes, boxes = sizes[1:], boxes[1:]
    pixels = _split_pixels(labels, sizes) if store_pixels else [None] * len(sizes)
    clusters = tuple(
        Cluster(k, int(size), tuple(int(v) for v in box), px)
        for k, (size, box, px) in enumerate(zip(sizes, boxes, pixels), start=1)
    )
    return ClusterLabeling(labels, clusters, color)


def max_cluster_size(labeling: ClusterLabeling) -> int:
    """Largest cluster size of a labeling, 0 when it has no clusters."""
    return max((c.size for c in labeling.clusters), default=0)


def largest_black_cluster(bits: np.ndarray) -> int:
    """Largest black cluster size straight from a bit plane, without building a labeling."""
    return int(max_cluster_kernel(bits))


def cluster_at(image: BinaryImage, row: int, col: int, cluster_id: int = 1) -> Cluster:
    """The full black cluster containing pixel (row, col)."""
    if image.bits[row, col] != BLACK:
        raise ValueError(f"pixel ({row}, {col}) is not black")

    members = np.sort(component_kernel(image.bits, row * image.width + col))
    rows, cols = np.divmod(members, image.width)
    bbox = (int(rows.min()), int(cols.min()), int(rows.max()), int(cols.max()))
    return Cluster(cluster_id, int(members.size), bbox, np.stack([rows, cols], axis=1))


def find_cluster_at_least(image: BinaryImage, n: int) -> Optional[Cluster]:
    """Some black cluster of at least 'n' pixels, or None. The search stops as soon as a growing cluster reaches
    'n'; only that one cluster is then completed to produce the witness.
    :param image: binary picture
    :param n: required cluster size, at least 1"""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")

    seed = int(find_at_least_kernel(image.bits, n))

    if seed < 0:
        return None

    row, col = divmod(seed, image.width)
    witness = cluster_at(image, row, col)
    log.debug(f"Cluster of size {witness.size} >= {n} found at ({row}, {col})")
    return witness


def cluster_rows(labeling: ClusterLabeling, include_pixels: bool = False) -> list[dict[str, int | str]]:
    """One mapping per cluster keyed by CLUSTER_FIELDS, optionally with a 'pixels' column of ';'-joined
    'row:col' pairs.
    :param labeling: cluster labeling to dump
    :param include_pixels: add the pixel column (requires a labeling built with store_pixels)"""
    rows = []

    for c in labeling.clusters:
        row: dict[str, int | str] = dict(zip(CLUSTER_FIELDS, [c.id, c.size, *c.bbox]))

        if include_pixels:
            if c.pixels is None:
                raise ValueError("pixel dump requested but the labeling was built without store_pixels")
            row["pixels"] = ";".join(f"{r}:{col}" for r, col in c.pixels.tolist())

        rows.append(row)

    return rows
