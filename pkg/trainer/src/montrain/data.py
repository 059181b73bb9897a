"""Training corpora: the bundled digits images plus seeded synthetic
stand-ins shaped like the named tabular and image datasets.

Every loader is deterministic in its seed and returns float32 features
laid out exactly as the exported model expects them (images row-major
height, width, channel).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.datasets import load_digits

from monrex import Dataset, save_dataset

NUCLEOTIDES = 4
DNA_POSITIONS = 57


@dataclass(frozen=True)
class TrainingData:
    """A train/eval split: flat float32 rows plus the input geometry.

    Image rows are flattened row-major height, width, channel, matching
    the evaluator's layout."""

    input_shape: tuple[int, ...]
    num_classes: int
    train_x: np.ndarray
    train_y: np.ndarray
    eval_x: np.ndarray
    eval_y: np.ndarray


def _split(x, y, seed: int, eval_fraction: float = 0.2) -> TrainingData:
    shape = tuple(x.shape[1:]) if x.ndim > 2 else (x.shape[1],)
    flat = np.ascontiguousarray(x, dtype=np.float32).reshape(len(x), -1)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(flat))
    flat, y = flat[order], np.asarray(y, dtype=np.int64)[order]
    cut = max(1, int(round(len(flat) * eval_fraction)))
    return TrainingData(
        input_shape=shape,
        num_classes=int(y.max()) + 1,
        train_x=flat[cut:],
        train_y=y[cut:],
        eval_x=flat[:cut],
        eval_y=y[:cut],
    )


def digits_data(seed: int) -> TrainingData:
    """The bundled 8x8 grayscale digit images, pixel range scaled to [0, 1]."""
    bunch = load_digits()
    x = (bunch.images / 16.0).reshape(-1, 8, 8, 1).astype(np.float32)
    y = bunch.target.astype(np.int64)
    return _split(x, y, seed)


def cars_data(seed: int) -> TrainingData:
    """Car-evaluation-shaped tabular data: the full 1728-row grid of six
    one-hot attributes, labeled by a fixed hierarchical rule."""
    sizes = (4, 4, 4, 3, 3, 3)
    grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
    codes = np.stack([g.ravel() for g in grids], axis=1)  # (1728, 6)

    # veto attributes force the lowest class; otherwise a weighted score
    # over comfort and price attributes buckets into the remaining three
    buying, maint, doors, persons, lug, safety = codes.T
    score = (3 - buying) + (3 - maint) + doors + persons + lug + 2 * safety
    labels = np.digitize(score, bins=[7, 10, 13])
    labels[(safety == 0) | (persons == 0)] = 0

    columns = []
    for attr, size in zip(codes.T, sizes):
        onehot = np.zeros((len(codes), size), dtype=np.float32)
        onehot[np.arange(len(codes)), attr] = 1.0
        columns.append(onehot)
    x = np.concatenate(columns, axis=1)
    return _split(x, labels.astype(np.int64), seed)


def ecoli_data(seed: int) -> TrainingData:
    """Protein-localization-shaped data: 7 features, 8 Gaussian classes."""
    rng = np.random.default_rng(seed ^ 0x5EED)
    per_class = 42
    centers = rng.uniform(0.15, 0.85, size=(8, 7))
    xs, ys = [], []
    for c in range(8):
        xs.append(centers[c] + rng.normal(0.0, 0.08, size=(per_class, 7)))
        ys.append(np.full(per_class, c))
    x = np.clip(np.concatenate(xs), 0.0, 1.0).astype(np.float32)
    return _split(x, np.concatenate(ys).astype(np.int64), seed)


def synthesize_dna_examples(count: int, seed: int, out=None) -> np.ndarray:
    """Uniform random one-hot nucleotide sequences, one row per example.

    Each of the 57 positions gets exactly one of 4 nucleotide bits set.
    When ``out`` is given the rows are also written as a dataset file.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, NUCLEOTIDES, size=(count, DNA_POSITIONS))
    x = np.zeros((count, DNA_POSITIONS, NUCLEOTIDES), dtype=np.float32)
    rows = np.arange(count)[:, None]
    cols = np.arange(DNA_POSITIONS)[None, :]
    x[rows, cols, picks] = 1.0
    flat = x.reshape(count, DNA_POSITIONS * NUCLEOTIDES)
    if out is not None:
        save_dataset(Dataset(examples=flat.astype(np.float64)), out)
    return flat


def _dna_labels(flat: np.ndarray) -> np.ndarray:
    """Planted promoter motif: specific nucleotides at a few fixed
    positions mark the positive class."""
    x = flat.reshape(len(flat), DNA_POSITIONS, NUCLEOTIDES)
    hits = x[:, 10, 3] + x[:, 25, 0] + x[:, 40, 1]
    return (hits >= 2).astype(np.int64)


def dna_data(seed: int, count: int = 2000) -> TrainingData:
    flat = synthesize_dna_examples(count, seed)
    return _split(flat, _dna_labels(flat), seed)


def fashion_data(seed: int, per_class: int = 200) -> TrainingData:
    """Fashion-shaped 8x8 images: ten procedural grayscale textures."""
    rng = np.random.default_rng(seed ^ 0xFA51)
    rows, cols = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    bases = [
        (rows % 2).astype(float),
        (cols % 2).astype(float),
        ((rows + cols) % 2).astype(float),
        (rows < 4).astype(float),
        (cols < 4).astype(float),
        ((rows - 3.5) ** 2 + (cols - 3.5) ** 2 < 8).astype(float),
        (np.abs(rows - cols) < 2).astype(float),
        (np.abs(rows + cols - 7) < 2).astype(float),
        ((rows % 4) < 2).astype(float),
        ((cols % 4) < 2).astype(float),
    ]
    xs, ys = [], []
    for c, base in enumerate(bases):
        noise = rng.normal(0.0, 0.15, size=(per_class, 8, 8))
        imgs = np.clip(base[None] * 0.8 + 0.1 + noise, 0.0, 1.0)
        xs.append(imgs)
        ys.append(np.full(per_class, c))
    x = np.concatenate(xs).reshape(-1, 8, 8, 1).astype(np.float32)
    return _split(x, np.concatenate(ys).astype(np.int64), seed)


def scalar_data(seed: int) -> TrainingData:
    """One-pixel reductions of the digit images: per-image mean intensity,
    labeled bright or dark about the median."""
    bunch = load_digits()
    means = (bunch.images / 16.0).mean(axis=(1, 2)).astype(np.float32)
    labels = (means > np.median(means)).astype(np.int64)
    return _split(means[:, None], labels, seed)


def load_training_data(dataset: str, architecture: str, seed: int) -> TrainingData:
    if architecture == "identity-1px":
        return scalar_data(seed)
    loaders = {
        "cars": cars_data,
        "ecoli": ecoli_data,
        "dna-promoter": dna_data,
        "mnist-subset": digits_data,
        "fashion-subset": fashion_data,
    }
    return loaders[dataset](seed)
