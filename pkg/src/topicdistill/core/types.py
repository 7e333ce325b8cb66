"""Domain types shared by every stage of the engine.

All types are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from ..errors import ValidationError
from .validation import UNIT_NORM_TOL, check_finite

BAND_TOL = 1e-6


class EmbeddingRole(enum.Enum):
    BASE = "base"
    TEACHER = "teacher"
    STUDENT = "student"


class Provenance(enum.Enum):
    FULL_RANGE = "full_range"
    RANGE_BOUND = "range_bound"
    EMBEDDING_SIM = "embedding_sim"


class Split(enum.Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


@dataclass(frozen=True)
class CorpusItem:
    """One text unit; the gold label, when present, is used only for evaluation."""

    id: int
    text: str
    gold_label: str | None = None


@dataclass(frozen=True)
class Corpus:
    """Text units with dense ids 0..N-1 and the original keys they were loaded under."""

    items: tuple[CorpusItem, ...]
    original_keys: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValidationError("corpus must contain at least one item")
        if len(self.original_keys) != len(self.items):
            raise ValidationError("original_keys must align one-to-one with items")
        for expected, item in enumerate(self.items):
            if item.id != expected:
                raise ValidationError(
                    f"corpus ids must be dense 0..N-1; item {expected} has id {item.id}"
                )
            if not item.text or not item.text.strip() or item.text != item.text.strip():
                raise ValidationError(f"item {expected} text must be non-empty and trimmed")
        seen: dict[str, int] = {}
        for idx, key in enumerate(self.original_keys):
            if key in seen:
                raise ValidationError(
                    f"duplicate original key {key!r} (items {seen[key]} and {idx})"
                )
            seen[key] = idx

    def __len__(self) -> int:
        return len(self.items)

    def texts(self) -> list[str]:
        return [item.text for item in self.items]

    @property
    def has_gold_labels(self) -> bool:
        return all(item.gold_label is not None for item in self.items)

    def gold_label_map(self) -> dict[int, str]:
        """Mapping id -> gold label; raises if any item lacks one."""
        out: dict[int, str] = {}
        for item in self.items:
            if item.gold_label is None:
                raise ValidationError(f"item {item.id} has no gold label")
            out[item.id] = item.gold_label
        return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Unit-normalized dense vectors aligned to corpus item ids.

    Vectors are held as float64 in memory; persistence casts to float32
    (see core.io). Rows must already be unit-norm within ``UNIT_NORM_TOL``;
    use :meth:`from_raw` to normalize arbitrary input.
    """

    role: EmbeddingRole
    vectors: np.ndarray
    item_ids: np.ndarray
    _row_of: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        vec = np.ascontiguousarray(np.asarray(self.vectors, dtype=np.float64))
        ids = np.ascontiguousarray(np.asarray(self.item_ids, dtype=np.int64))
        if vec.ndim != 2 or vec.shape[0] == 0 or vec.shape[1] == 0:
            raise ValidationError(f"vectors must be a non-empty 2-D matrix, got {vec.shape}")
        if ids.ndim != 1 or ids.shape[0] != vec.shape[0]:
            raise ValidationError("item_ids must align one-to-one with vector rows")
        if np.any(ids < 0):
            raise ValidationError("item ids must be non-negative")
        check_finite(vec, "vectors")
        norms = np.linalg.norm(vec, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if bad.size:
            idx = int(bad[0])
            raise ValidationError(
                f"vector row {idx} has norm {norms[idx]:.9f}, expected 1 within {UNIT_NORM_TOL:g}"
            )
        row_of: dict[int, int] = {}
        for row, item_id in enumerate(ids.tolist()):
            if item_id in row_of:
                raise ValidationError(f"duplicate item id {item_id} in embedding set")
            row_of[item_id] = row
        object.__setattr__(self, "vectors", _freeze(vec))
        object.__setattr__(self, "item_ids", _freeze(ids))
        object.__setattr__(self, "_row_of", row_of)

    @classmethod
    def from_raw(cls, role: EmbeddingRole, vectors, item_ids=None) -> "EmbeddingSet":
        """Build a set from arbitrary finite vectors, normalizing rows first."""
        from .validation import normalize_rows

        vec = normalize_rows(vectors)
        if item_ids is None:
            item_ids = np.arange(vec.shape[0], dtype=np.int64)
        return cls(role=role, vectors=vec, item_ids=np.asarray(item_ids, dtype=np.int64))

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def covers(self, ids: Iterable[int]) -> bool:
        return all(int(i) in self._row_of for i in ids)

    def rows_for(self, ids: Iterable[int]) -> np.ndarray:
        try:
            idx = [self._row_of[int(i)] for i in ids]
        except KeyError as exc:
            raise ValidationError(f"item id {exc.args[0]} not present in embedding set") from None
        return self.vectors[idx]

    def pair_cosines(self, i_ids: Sequence[int], j_ids: Sequence[int]) -> np.ndarray:
        """Cosine similarity per aligned (i, j) pair; rows are unit so this is a dot."""
        left = self.rows_for(i_ids)
        right = self.rows_for(j_ids)
        return np.clip(np.einsum("ij,ij->i", left, right), -1.0, 1.0)

    def with_role(self, role: EmbeddingRole) -> "EmbeddingSet":
        return EmbeddingSet(role=role, vectors=self.vectors, item_ids=self.item_ids)


@dataclass(frozen=True)
class PairRecord:
    """A labeled pair (i, j, y); base_sim is the base-space cosine at sampling time."""

    i: int
    j: int
    y: float
    base_sim: float | None = None


@dataclass(frozen=True)
class PairCandidate:
    """An unlabeled pair emitted by a sampler, before the teacher assigns y."""

    i: int
    j: int
    base_sim: float | None = None


_BINARY_LABELS = (0.0, 1.0)


@dataclass(frozen=True)
class PairDataset:
    """Records (i, j, y) with provenance, split, and (for band-restricted data) the band."""

    provenance: Provenance
    split: Split
    records: tuple[PairRecord, ...]
    band: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.band is not None:
            lo, hi = self.band
            if not (-1.0 <= lo < hi <= 1.0):
                raise ValidationError(f"band [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1")
            object.__setattr__(self, "band", (float(lo), float(hi)))
        if self.provenance is Provenance.RANGE_BOUND and self.band is None:
            raise ValidationError("range-bound datasets must carry their band")
        binary = self.provenance in (Provenance.FULL_RANGE, Provenance.RANGE_BOUND)
        seen: set[tuple[int, int]] = set()
        for idx, rec in enumerate(self.records):
            if rec.i == rec.j:
                raise ValidationError(f"record {idx}: pair members must differ (i=j={rec.i})")
            if rec.i < 0 or rec.j < 0:
                raise ValidationError(f"record {idx}: item ids must be non-negative")
            if binary:
                if rec.y not in _BINARY_LABELS:
                    raise ValidationError(
                        f"record {idx}: binary provenance requires y in {{0.0, 1.0}}, got {rec.y}"
                    )
                key = (rec.i, rec.j) if rec.i < rec.j else (rec.j, rec.i)
            else:
                if not -1.0 <= rec.y <= 1.0:
                    raise ValidationError(f"record {idx}: y={rec.y} outside [-1, 1]")
                key = (rec.i, rec.j)
            if key in seen:
                raise ValidationError(f"record {idx}: duplicate pair {key}")
            seen.add(key)
            if self.provenance is Provenance.RANGE_BOUND:
                if rec.base_sim is None:
                    raise ValidationError(f"record {idx}: range-bound records need base_sim")
                lo, hi = self.band  # type: ignore[misc]
                if not (lo - BAND_TOL <= rec.base_sim <= hi + BAND_TOL):
                    raise ValidationError(
                        f"record {idx}: base_sim {rec.base_sim} outside band [{lo}, {hi}]"
                    )

    def __len__(self) -> int:
        return len(self.records)

    def labels(self) -> np.ndarray:
        return np.array([rec.y for rec in self.records], dtype=np.float64)

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        i = np.array([rec.i for rec in self.records], dtype=np.int64)
        j = np.array([rec.j for rec in self.records], dtype=np.int64)
        return i, j

    def item_ids(self) -> set[int]:
        out: set[int] = set()
        for rec in self.records:
            out.add(rec.i)
            out.add(rec.j)
        return out


@dataclass
class RunConfig:
    """Tunable knobs for sampling, training, threshold tuning, and clustering."""

    seed: int = 0
    band: tuple[float, float] = (0.65, 0.95)
    cosent_scale: float = 20.0
    learning_rate: float = 1e-3
    epochs: int = 5
    batch_size: int = 64
    tau: float | None = None
    min_cluster_size: int = 2
    tau_grid: float = 0.01
    tau_grid_range: tuple[float, float] = (0.0, 1.0)
    include_singletons: bool = True
    dataset_weights: tuple[float, ...] | None = None
    segregate_datasets: bool = False

    def validate(self) -> "RunConfig":
        lo, hi = self.band
        if not (-1.0 <= lo < hi <= 1.0):
            raise ValidationError(f"band [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1")
        if self.cosent_scale <= 0:
            raise ValidationError("cosent_scale must be positive")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.batch_size < 2:
            raise ValidationError("batch_size must be >= 2")
        if self.tau is not None and not -1.0 <= self.tau <= 1.0:
            raise ValidationError("tau must lie in [-1, 1]")
        if self.min_cluster_size < 2:
            raise ValidationError("min_cluster_size must be >= 2")
        if self.tau_grid <= 0:
            raise ValidationError("tau_grid step must be positive")
        glo, ghi = self.tau_grid_range
        if not (-1.0 < glo < ghi <= 1.0):
            raise ValidationError("tau_grid_range must lie within (-1, 1] with lo < hi")
        if self.dataset_weights is not None and any(w < 0 for w in self.dataset_weights):
            raise ValidationError("dataset_weights must be non-negative")
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "band": list(self.band),
            "cosent_scale": self.cosent_scale,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "tau": self.tau,
            "min_cluster_size": self.min_cluster_size,
            "tau_grid": self.tau_grid,
            "tau_grid_range": list(self.tau_grid_range),
            "include_singletons": self.include_singletons,
            "dataset_weights": None if self.dataset_weights is None else list(self.dataset_weights),
            "segregate_datasets": self.segregate_datasets,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown run config fields: {sorted(unknown)}")
        cfg = cls(**known)
        cfg.band = tuple(cfg.band)  # type: ignore[assignment]
        cfg.tau_grid_range = tuple(cfg.tau_grid_range)  # type: ignore[assignment]
        if cfg.dataset_weights is not None:
            cfg.dataset_weights = tuple(cfg.dataset_weights)
        return cfg
