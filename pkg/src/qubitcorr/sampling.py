"""Seeded, chunked random streams.

Work is cut into fixed-size chunks, each with its own child of
``SeedSequence(seed)``. Output depends only on ``(seed, total)``, never on how
many workers process the chunks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 8192


def chunk_plan(seed: int, total: int, chunk: int = CHUNK):
    """List of ``(generator, size)`` pairs covering ``total`` draws."""
    if total < 1:
        raise ValueError("need at least one sample")
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return [(np.random.default_rng(ss), n) for ss, n in zip(children, sizes)]


def map_chunks(fn, seed: int, total: int, workers: int = 1, chunk: int = CHUNK) -> list:
    """Apply ``fn(rng, size)`` to every chunk, returning results in chunk order."""
    plan = chunk_plan(seed, total, chunk)
    if workers <= 1 or len(plan) == 1:
        return [fn(rng, n) for rng, n in plan]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda item: fn(*item), plan))


def unit_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """``n`` points uniform on the unit sphere in ``dim`` dimensions (rows)."""
    v = rng.standard_normal((n, dim))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    # an exactly-zero Gaussian draw has probability zero; redraw defensively
    while np.any(norms == 0):
        bad = norms[:, 0] == 0
        v[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(v, axis=1, keepdims=True)
    return v / norms
