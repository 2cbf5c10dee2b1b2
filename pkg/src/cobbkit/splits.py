"""Deterministic 70/15/15 train/validation/test splitting.

Shuffling uses numpy's PCG64 generator so a (seed, id list) pair always
reproduces the same split. Sizes are floor(0.70 N), floor(0.15 N), and
the remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotations import ExclusionList, apply_exclusions

TRAIN_FRACTION = 0.70
VALIDATION_FRACTION = 0.15


@dataclass(frozen=True)
class DatasetSplit:
    train: list[str]
    validation: list[str]
    test: list[str]
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "train": list(self.train),
            "validation": list(self.validation),
            "test": list(self.test),
            "seed": self.seed,
        }


def split_dataset(ids: list[str], seed: int) -> DatasetSplit:
    if len(ids) < 3:
        raise ValueError(f"need at least 3 ids to split, got {len(ids)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    shuffled = [ids[i] for i in order]
    n = len(ids)
    n_train = int(n * TRAIN_FRACTION)
    n_val = int(n * VALIDATION_FRACTION)
    return DatasetSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
        seed=seed,
    )


def exclude_from_test(split: DatasetSplit, excl: ExclusionList) -> tuple[DatasetSplit, list[str]]:
    """Drop excluded ids from the test list only; returns (split, removed)."""
    kept, removed = apply_exclusions(split.test, excl)
    return DatasetSplit(train=split.train, validation=split.validation, test=kept, seed=split.seed), removed
