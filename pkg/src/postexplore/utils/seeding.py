"""
Seed plumbing shared by the training loop and the sweep runner.

A run owns two independent `numpy.random.Generator` streams spawned from its master
seed: one for training (goal sampling, epsilon-greedy draws, post-exploration, relabel
plans) and one for evaluation tie-breaks, so evaluation never perturbs training.
"""

from __future__ import annotations

import hashlib
from typing import Any, Iterable, Tuple

import numpy as np


def spawn_streams(master_seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    train_seq, eval_seq = np.random.SeedSequence(master_seed).spawn(2)
    return np.random.default_rng(train_seq), np.random.default_rng(eval_seq)


def derive_seed(sweep_seed: int, parts: Iterable[Tuple[str, Any]]) -> int:
    """
    Stable 63-bit seed from a sweep seed and a sequence of (key, value) pairs.

    The pairs are sorted by key before hashing, so the result does not depend on the
    order in which overrides were declared, nor on the process that computes it.
    """
    payload = "|".join(f"{key}={value!r}" for key, value in sorted(parts, key=lambda p: p[0]))
    digest = hashlib.sha256(f"{sweep_seed}|{payload}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
