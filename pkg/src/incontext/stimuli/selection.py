"""Balanced target selection.

Targets are drawn uniformly over (category x size-bin) cells with at most
one target object per source image, deterministically under a seed.
"""

from dataclasses import dataclass

import numpy as np

from .annotations import SIZE_BINS


class InfeasibleSelectionError(Exception):
    """Not enough candidates to fill the requested quotas."""

    def __init__(self, deficits):
        self.deficits = deficits  # list of (category, size_bin, missing)
        lines = ", ".join(f"{c}/{s}: short {m}" for c, s, m in deficits)
        super().__init__(f"deficient cells: {lines}")


@dataclass
class BalanceConfig:
    categories: list | None = None        # None: every category present
    sizes: tuple = tuple(SIZE_BINS)       # size bins to include
    total: int | None = None              # total target count, or
    per_cell: int | None = None           # exact count per (category, size)
    exclude_border: bool = True

    def __post_init__(self):
        if (self.total is None) == (self.per_cell is None):
            raise ValueError("set exactly one of total / per_cell")


def select_targets(annotations, config, seed):
    """Pick a balanced target list: the skeleton of a trial manifest.

    Cell quotas differ by at most one; every image contributes at most one
    target. Raises InfeasibleSelectionError naming the short cells.
    """
    rng = np.random.default_rng(seed)
    categories = config.categories
    if categories is None:
        categories = sorted({a.category for a in annotations})
    sizes = list(config.sizes)
    cells = [(c, s) for c in categories for s in sizes]

    pools = {cell: [] for cell in cells}
    for ann in sorted(annotations, key=lambda a: (a.image_id, a.bbox)):
        if config.exclude_border and ann.touches_border:
            continue
        key = (ann.category, ann.size_bin)
        if key in pools:
            pools[key].append(ann)
    for cell in cells:
        pool = pools[cell]
        rng.shuffle(pool)

    if config.per_cell is not None:
        quotas = {cell: config.per_cell for cell in cells}
    else:
        base, extra = divmod(config.total, len(cells))
        quotas = {cell: base for cell in cells}
        for idx in rng.choice(len(cells), size=extra, replace=False):
            quotas[cells[idx]] += 1

    chosen = []
    used_images = set()
    deficits = []
    max_quota = max(quotas.values(), default=0)
    remaining = dict(quotas)
    # round-robin over cells so image collisions are shared fairly
    for _ in range(max_quota):
        for cell in cells:
            if remaining[cell] <= 0:
                continue
            pool = pools[cell]
            while pool and pool[-1].image_id in used_images:
                pool.pop()
            if not pool:
                deficits.append((cell[0], cell[1], remaining[cell]))
                remaining[cell] = 0
                continue
            ann = pool.pop()
            used_images.add(ann.image_id)
            chosen.append(ann)
            remaining[cell] -= 1

    if deficits:
        raise InfeasibleSelectionError(sorted(deficits))
    return chosen
