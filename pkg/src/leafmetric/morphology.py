"""Binary mask machinery: component labeling, speck removal, thinning.

Foreground connectivity is 8-adjacent throughout, so thin diagonal petioles
and serrated margins stay in one piece. Thinning is the two-subiteration
Zhang-Suen scheme run to a fixpoint, with a deterministic cleanup for the
rare 2x2 blocks the textbook rules can leave locked in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .segmentation import BinaryMask

_STRUCTURE_8 = np.ones((3, 3), dtype=np.uint8)


@dataclass(frozen=True)
class LabeledComponents:
    """Partition of mask foreground into 8-connected objects.

    labels holds 0 for background and ids 1..n assigned in raster-scan order
    of each component's first pixel; areas[i] is the pixel count of id i
    (areas[0] is always 0).
    """

    labels: np.ndarray
    areas: np.ndarray

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def count(self) -> int:
        return len(self.areas) - 1

    def area_of(self, component_id: int) -> int:
        return int(self.areas[component_id])


def label_components(mask: BinaryMask) -> LabeledComponents:
    """Label maximal 8-connected foreground components.

    scipy does the sweep; ids are then remapped so component 1 is the first
    one met in raster order, independent of scipy's internal numbering.
    """
    raw, n = ndimage.label(mask.bits, structure=_STRUCTURE_8)
    if n == 0:
        return LabeledComponents(raw.astype(np.int32), np.zeros(1, dtype=np.int64))
    flat = raw.ravel()
    ids, first = np.unique(flat, return_index=True)
    nonzero = ids != 0
    order = np.argsort(first[nonzero], kind="stable")
    lut = np.zeros(int(ids.max()) + 1, dtype=np.int32)
    lut[ids[nonzero][order]] = np.arange(1, len(order) + 1, dtype=np.int32)
    labels = lut[raw]
    areas = np.bincount(labels.ravel(), minlength=len(order) + 1).astype(np.int64)
    areas[0] = 0
    return LabeledComponents(labels, areas)


def remove_small_components(lc: LabeledComponents, min_area: int) -> BinaryMask:
    """Drop every object strictly smaller than min_area pixels."""
    if min_area < 0:
        raise ValueError(f"min_area {min_area} must be >= 0")
    keep = lc.areas >= min_area
    keep[0] = False
    return BinaryMask(keep[lc.labels])


def count_foreground(mask: BinaryMask) -> int:
    return int(np.count_nonzero(mask.bits))


def _neighbor_planes(m: np.ndarray):
    # P2..P9 clockwise from north, zero-padded borders
    p = np.pad(m, 1, constant_values=False)
    return (
        p[:-2, 1:-1], p[:-2, 2:], p[1:-1, 2:], p[2:, 2:],
        p[2:, 1:-1], p[2:, :-2], p[1:-1, :-2], p[:-2, :-2],
    )


def _zhang_suen_subpass(m: np.ndarray, first: bool) -> bool:
    planes = _neighbor_planes(m)
    b = np.zeros(m.shape, dtype=np.uint8)
    for plane in planes:
        b += plane
    a = np.zeros(m.shape, dtype=np.uint8)
    for cur, nxt in zip(planes, planes[1:] + planes[:1]):
        a += ~cur & nxt
    p2, _, p4, _, p6, _, p8, _ = planes
    cond = m & (b >= 2) & (b <= 6) & (a == 1)
    if first:
        cond &= ~(p2 & p4 & p6) & ~(p4 & p6 & p8)
    else:
        cond &= ~(p2 & p4 & p8) & ~(p2 & p6 & p8)
    if not cond.any():
        return False
    m[cond] = False
    return True


def _crossing_number(m: np.ndarray, y: int, x: int) -> int:
    h, w = m.shape

    def at(yy, xx):
        return 1 if 0 <= yy < h and 0 <= xx < w and m[yy, xx] else 0

    seq = [
        at(y - 1, x), at(y - 1, x + 1), at(y, x + 1), at(y + 1, x + 1),
        at(y + 1, x), at(y + 1, x - 1), at(y, x - 1), at(y - 1, x - 1),
    ]
    return sum(1 for cur, nxt in zip(seq, seq[1:] + seq[:1]) if cur == 0 and nxt == 1)


def _remove_2x2_blocks(m: np.ndarray) -> bool:
    """Break up surviving 2x2 solid blocks, deterministically.

    Deletions only shrink the mask, so scanning the initial block corners in
    raster order and re-checking each is equivalent to a full rescan.
    """
    blocks = m[:-1, :-1] & m[:-1, 1:] & m[1:, :-1] & m[1:, 1:]
    if not blocks.any():
        return False
    for y, x in np.argwhere(blocks):
        if not (m[y, x] and m[y, x + 1] and m[y + 1, x] and m[y + 1, x + 1]):
            continue
        for cy, cx in ((y + 1, x + 1), (y + 1, x), (y, x + 1), (y, x)):
            if _crossing_number(m, cy, cx) == 1:
                m[cy, cx] = False
                break
        else:
            m[y + 1, x + 1] = False
    return True


def thin(mask: BinaryMask) -> BinaryMask:
    """Thin foreground to one-pixel-wide lines (Zhang-Suen to fixpoint)."""
    m = mask.bits.copy()
    while True:
        changed = False
        while True:
            first = _zhang_suen_subpass(m, first=True)
            second = _zhang_suen_subpass(m, first=False)
            if not (first or second):
                break
            changed = True
        if _remove_2x2_blocks(m):
            changed = True
        if not changed:
            return BinaryMask(m)


def branch_point_count(skeleton: BinaryMask) -> int:
    """Skeleton pixels where three or more line segments meet.

    A pixel forks when the 8-neighborhood crossing number (background-to-
    foreground transitions around it) reaches 3; plain bends stay at 2.
    Nonzero counts flag branched skeletons (lobed leaves), where the pixel
    count overstates a single midline length.
    """
    planes = _neighbor_planes(skeleton.bits)
    a = np.zeros(skeleton.bits.shape, dtype=np.uint8)
    for cur, nxt in zip(planes, planes[1:] + planes[:1]):
        a += ~cur & nxt
    return int((skeleton.bits & (a >= 3)).sum())
