"""Compiled flood-fill kernels. Internal use only; the public surface is in 'cluster' and 'crossing'.

All traversals use an explicit stack sized to the lattice (every pixel is pushed at most once, it is marked when
pushed), so the work is linear in the pixel count and clusters of any size never touch the call stack."""
import numpy as np

from numba import njit


@njit(cache=True)
def label_kernel(bits, color):
    """Label 4-connected clusters of 'color' in raster discovery order, starting at 1.
    Returns (labels, sizes, boxes) where sizes[k] and boxes[k] (min_row, min_col, max_row, max_col) describe
    label k; index 0 is unused."""
    height, width = bits.shape
    labels = np.zeros((height, width), dtype=np.int32)
    capacity = (height * width + 1) // 2 + 1  # checkerboard bound on the number of same-colour clusters
    sizes = np.zeros(capacity, dtype=np.int64)
    boxes = np.zeros((capacity, 4), dtype=np.int32)
    stack = np.empty(height * width, dtype=np.int64)
    count = 0

    for r in range(height):
        for c in range(width):
            if bits[r, c] != color or labels[r, c] != 0:
                continue

            count += 1
            labels[r, c] = count
            stack[0] = r * width + c
            top = 1
            size = 0
            r0, c0, r1, c1 = r, c, r, c

            while top > 0:
                top -= 1
                idx = stack[top]
                i = idx // width
                j = idx - i * width
                size += 1
                r0 = min(r0, i)
                r1 = max(r1, i)
                c0 = min(c0, j)
                c1 = max(c1, j)

                if i > 0 and bits[i - 1, j] == color and labels[i - 1, j] == 0:
                    labels[i - 1, j] = count
                    stack[top] = idx - width
                    top += 1

                if i + 1 < height and bits[i + 1, j] == color and labels[i + 1, j] == 0:
                    labels[i + 1, j] = count
                    stack[top] = idx + width
                    top += 1

                if j > 0 and bits[i, j - 1] == color and labels[i, j - 1] == 0:
                    labels[i, j - 1] = count
                    stack[top] = idx - 1
                    top += 1

                if j + 1 < width and bits[i, j + 1] == color and labels[i, j + 1] == 0:
                    labels[i, j + 1] = count
                    stack[top] = idx + 1
                    top += 1

            sizes[count] = size
            boxes[count, 0] = r0
            boxes[count, 1] = c0
            boxes[count, 2] = r1
            boxes[count, 3] = c1

    return labels, sizes[: count + 1], boxes[: count + 1]


@njit(cache=True)
def _flood(bits, seen, stack, seed, limit):
    """Grow the black cluster of 'seed', marking 'seen'. Stops once 'limit' pixels are marked (limit <= 0 means
    no limit). Returns the number of marked pixels; stack[:result] holds them when the fill completed."""
    height, width = bits.shape
    i0 = seed // width
    seen[i0, seed - i0 * width] = 1
    stack[0] = seed
    marked = 1
    cursor = 0

    if limit > 0 and marked >= limit:
        return marked

    # breadth-first order over a single array: stack[cursor:marked] is the frontier
    while cursor < marked:
        idx = stack[cursor]
        cursor += 1
        i = idx // width
        j = idx - i * width

        for k in range(4):
            if k == 0:
                if i == 0:
                    continue
                nxt = idx - width
            elif k == 1:
                if i + 1 == height:
                    continue
                nxt = idx + width
            elif k == 2:
                if j == 0:
                    continue
                nxt = idx - 1
            else:
                if j + 1 == width:
                    continue
                nxt = idx + 1

            ni = nxt // width
            nj = nxt - ni * width

            if bits[ni, nj] == 1 and seen[ni, nj] == 0:
                seen[ni, nj] = 1
                stack[marked] = nxt
                marked += 1

                if limit > 0 and marked >= limit:
                    return marked

    return marked


@njit(cache=True)
def max_cluster_kernel(bits):
    """Size of the largest black cluster, 0 if there is none."""
    height, width = bits.shape
    seen = np.zeros((height, width), dtype=np.uint8)
    stack = np.empty(height * width, dtype=np.int64)
    best = 0

    for r in range(height):
        for c in range(width):
            if bits[r, c] == 1 and seen[r, c] == 0:
                size = _flood(bits, seen, stack, r * width + c, 0)

                if size > best:
                    best = size

    return best


@njit(cache=True)
def find_at_least_kernel(bits, n):
    """Raster index of a pixel whose black cluster reaches 'n' pixels, or -1. The search stops as soon as the
    growing cluster reaches 'n'."""
    height, width = bits.shape
    seen = np.zeros((height, width), dtype=np.uint8)
    stack = np.empty(height * width, dtype=np.int64)

    for r in range(height):
        for c in range(width):
            if bits[r, c] == 1 and seen[r, c] == 0:
                if _flood(bits, seen, stack, r * width + c, n) >= n:
                    return r * width + c

    return -1


@njit(cache=True)
def component_kernel(bits, seed):
    """Raster indices of every pixel in the black cluster containing 'seed', in discovery order."""
    height, width = bits.shape
    seen = np.zeros((height, width), dtype=np.uint8)
    stack = np.empty(height * width, dtype=np.int64)
    size = _flood(bits, seen, stack, seed, 0)
    return stack[:size].copy()


@njit(cache=True)
def crossing_kernel(bits):
    """True if a black 4-connected path joins column 0 to the last column."""
    height, width = bits.shape
    seen = np.zeros((height, width), dtype=np.uint8)
    stack = np.empty(height * width, dtype=np.int64)
    top = 0

    for r in range(height):
        if bits[r, 0] == 1:
            if width == 1:
                return True
            seen[r, 0] = 1
            stack[top] = r * width
            top += 1

    while top > 0:
        top -= 1
        idx = stack[top]
        i = idx // width
        j = idx - i * width

        for k in range(4):
            ni, nj = i, j

            if k == 0:
                ni = i - 1
            elif k == 1:
                ni = i + 1
            elif k == 2:
                nj = j - 1
            else:
                nj = j + 1

            if ni < 0 or ni >= height or nj < 0 or nj >= width:
                continue

            if bits[ni, nj] == 1 and seen[ni, nj] == 0:
                if nj == width - 1:
                    return True
                seen[ni, nj] = 1
                stack[top] = ni * width + nj
                top += 1

    return False
