"""Raw covering kernels on id arrays: greedy max-coverage and point scan."""

from __future__ import annotations

import numpy as np

DEFAULT_TIE_WIDTH = 64


def incidence(universe, target_bits: np.ndarray, tile_ids: np.ndarray, pool_ids: np.ndarray) -> np.ndarray:
    """Bool matrix M[p, j]: translate ``pool[p] * tile`` contains the j-th target element."""
    target_ids = np.flatnonzero(target_bits)
    col = np.full(universe.order, -1, dtype=np.int64)
    col[target_ids] = np.arange(len(target_ids))
    M = np.zeros((len(pool_ids), len(target_ids)), dtype=bool)
    if len(pool_ids) == 0 or len(tile_ids) == 0 or len(target_ids) == 0:
        return M
    step = max(1, (1 << 22) // len(tile_ids))
    for r0 in range(0, len(pool_ids), step):
        prods = universe.mul_outer(pool_ids[r0:r0 + step], tile_ids)
        cols = col[prods]
        rows = np.broadcast_to(np.arange(r0, r0 + prods.shape[0])[:, None], prods.shape)
        hit = cols >= 0
        M[rows[hit], cols[hit]] = True
    return M


def _greedy_run(M: np.ndarray, first: int | None) -> list[int] | None:
    n_pool, n_target = M.shape
    covered = np.zeros(n_target, dtype=bool)
    hits = M.sum(axis=1).astype(np.int64)
    gain = hits.copy()
    chosen: list[int] = []
    pick = first
    while not covered.all():
        if pick is None:
            # most new elements, then least overhang, then smallest pool id
            tied = np.flatnonzero(gain == gain.max())
            pick = int(tied[np.argmax(hits[tied])])
        if gain[pick] <= 0:
            return None
        newly = M[pick] & ~covered
        covered |= newly
        gain -= M[:, newly].sum(axis=1)
        chosen.append(pick)
        pick = None
    return _prune(M, chosen)


def _prune(M: np.ndarray, chosen: list[int]) -> list[int]:
    """Drop redundant translates, earliest pick first."""
    if not chosen:
        return chosen
    counts = M[chosen].sum(axis=0)
    kept = list(chosen)
    for c in chosen:
        if np.all(counts[M[c]] >= 2):
            counts -= M[c]
            kept.remove(c)
    return kept


def greedy_cover(M: np.ndarray, tie_width: int = DEFAULT_TIE_WIDTH) -> list[int] | None:
    """Greedy max-coverage cover with tie exploration on the first pick.

    Each of the first ``tie_width`` maximal-gain translates (in pool order)
    seeds an otherwise deterministic greedy run; the shortest result wins,
    earlier seeds breaking ties. Returns pool indices, or None if uncoverable.
    """
    if M.shape[1] == 0:
        return []
    gain = M.sum(axis=1)
    if M.shape[0] == 0 or gain.max() == 0:
        return None
    seeds = np.flatnonzero(gain == gain.max())[: max(1, tie_width)]
    best = None
    for s in seeds:
        run = _greedy_run(M, int(s))
        if run is not None and (best is None or len(run) < len(best)):
            best = run
    return best


def point_scan_cover(universe, target_bits: np.ndarray, tile_bits: np.ndarray) -> list[int] | None:
    """Cover by self-translates: each still uncovered target element ``x``
    (ascending id) contributes the translate ``x * tile``. Needs 1 in tile."""
    if not tile_bits[universe.identity]:
        return None
    tile_ids = np.flatnonzero(tile_bits)
    covered = ~target_bits.copy()
    chosen = []
    for x in np.flatnonzero(target_bits):
        if covered[x]:
            continue
        chosen.append(int(x))
        covered[universe.mul_outer(np.array([x]), tile_ids)[0]] = True
    return chosen
