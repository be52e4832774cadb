"""Uniform-grid cell-list neighbor search.

Cells have edge length equal to the search radius, so candidates for any
point lie in its own cell plus the adjacent ones.  Pairs are produced once
(i < j) in a canonical (i, j)-sorted order, which fixes the downstream
summation order and keeps runs bit-reproducible.
"""

from __future__ import annotations

import numpy as np

__all__ = ["neighbor_pairs", "brute_force_pairs", "active_columns"]


def active_columns(dimensionality: int) -> tuple[int, ...]:
    """Coordinate columns that carry the simulation: (x, z) in 2D, all in 3D."""
    return (0, 2) if dimensionality == 2 else (0, 1, 2)


_HALF_OFFSETS_2D = np.array(
    [(0, 0), (0, 1), (1, -1), (1, 0), (1, 1)], dtype=np.int64)

_HALF_OFFSETS_3D = np.array(
    [(0, 0, 0), (0, 0, 1), (0, 1, -1), (0, 1, 0), (0, 1, 1)]
    + [(1, a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)],
    dtype=np.int64)


def neighbor_pairs(positions: np.ndarray, radius: float,
                   dimensionality: int) -> tuple[np.ndarray, np.ndarray]:
    """All unique pairs (i, j), i < j, with |x_i - x_j| < radius.

    positions is (N, 3); only the active columns for the dimensionality are
    considered.  Returns two int64 arrays sorted lexicographically by (i, j).
    """
    pts = np.asarray(positions, dtype=np.float64)[:, active_columns(dimensionality)]
    n = pts.shape[0]
    if n < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty

    mins = pts.min(axis=0)
    cells = np.floor((pts - mins) / radius).astype(np.int64)
    dims = cells.max(axis=0) + 1

    flat = np.ravel_multi_index(tuple(cells.T), tuple(dims))
    order = np.argsort(flat, kind="stable")
    sorted_flat = flat[order]

    offsets = _HALF_OFFSETS_2D if dimensionality == 2 else _HALF_OFFSETS_3D
    i_chunks: list[np.ndarray] = []
    j_chunks: list[np.ndarray] = []
    all_idx = np.arange(n, dtype=np.int64)

    for off in offsets:
        target = cells + off
        valid = np.all((target >= 0) & (target < dims), axis=1)
        if not valid.any():
            continue
        src = all_idx[valid]
        qflat = np.ravel_multi_index(tuple(target[valid].T), tuple(dims))
        lo = np.searchsorted(sorted_flat, qflat, side="left")
        hi = np.searchsorted(sorted_flat, qflat, side="right")
        counts = hi - lo
        total = int(counts.sum())
        if total == 0:
            continue
        i_idx = np.repeat(src, counts)
        run_start = np.repeat(np.cumsum(counts) - counts, counts)
        j_sorted = np.repeat(lo, counts) + (np.arange(total) - run_start)
        j_idx = order[j_sorted]
        if not off.any():
            keep = i_idx < j_idx  # within-cell: count each pair once
        else:
            keep = np.ones(total, dtype=bool)
        d = pts[i_idx] - pts[j_idx]
        keep &= np.einsum("ij,ij->i", d, d) < radius * radius
        i_chunks.append(i_idx[keep])
        j_chunks.append(j_idx[keep])

    if not i_chunks:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty

    pi = np.concatenate(i_chunks)
    pj = np.concatenate(j_chunks)
    swap = pi > pj
    pi[swap], pj[swap] = pj[swap], pi[swap].copy()
    perm = np.lexsort((pj, pi))
    return pi[perm], pj[perm]


def brute_force_pairs(positions: np.ndarray, radius: float,
                      dimensionality: int) -> tuple[np.ndarray, np.ndarray]:
    """O(N^2) reference enumeration of the same pair set."""
    pts = np.asarray(positions, dtype=np.float64)[:, active_columns(dimensionality)]
    n = pts.shape[0]
    if n < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    iu, ju = np.triu_indices(n, k=1)
    mask = d2[iu, ju] < radius * radius
    return iu[mask].astype(np.int64), ju[mask].astype(np.int64)
