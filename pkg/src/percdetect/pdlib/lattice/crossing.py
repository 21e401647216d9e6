"""Left-right crossings of a picture by black paths."""
import networkx as nx
import numpy as np

from ..models.images import BinaryImage
from ._kernels import crossing_kernel

_SOURCE = "source"
_SINK = "sink"


def has_left_right_crossing(image: BinaryImage) -> bool:
    """True iff some black 4-connected path touches both column 0 and the last column."""
    return bool(crossing_kernel(image.bits))


def crossing_graph(image: BinaryImage) -> nx.DiGraph:
    """Flow network for vertex-disjoint crossings: each black pixel is split into an in/out pair joined by a unit
    capacity arc, side-adjacent black pixels are joined out->in without a capacity (unbounded), a virtual source
    feeds column 0 and the last column drains into a virtual sink."""
    bits = image.bits
    height, width = bits.shape
    g = nx.DiGraph()

    for r, c in np.argwhere(bits == 1).tolist():
        g.add_edge(("in", r, c), ("out", r, c), capacity=1)

        if c == 0:
            g.add_edge(_SOURCE, ("in", r, c))

        if c == width - 1:
            g.add_edge(("out", r, c), _SINK)

        for dr, dc in ((1, 0), (0, 1)):
            nr, nc = r + dr, c + dc

            if nr < height and nc < width and bits[nr, nc] == 1:
                g.add_edge(("out", r, c), ("in", nr, nc))
                g.add_edge(("out", nr, nc), ("in", r, c))

    return g


def count_disjoint_crossings(image: BinaryImage) -> int:
    """Maximal number of vertex-disjoint black left-right crossings, as a unit vertex capacity maximum flow."""
    if not has_left_right_crossing(image):
        return 0

    g = crossing_graph(image)
    return int(nx.maximum_flow_value(g, _SOURCE, _SINK))
