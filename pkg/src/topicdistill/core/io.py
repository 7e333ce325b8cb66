"""Persistence for corpora, embeddings, and pair datasets.

File formats:

* Corpus: line-delimited JSON records with fields ``text`` (required),
  ``label`` (optional), ``key`` (optional).
* Embeddings: binary; magic ``PRSM``, format version byte, role byte,
  dim and count as 64-bit little-endian unsigned, row-major 32-bit
  little-endian floats, then item ids as 64-bit little-endian unsigned.
* Pair datasets / candidates: line-delimited JSON with a header record
  carrying provenance, split, and band, followed by one record per pair.

Round-trips are exact: byte equality for embeddings, record equality for
corpora and datasets (JSON floats are written with shortest-round-trip repr).
"""
from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from ..errors import ValidationError
from .types import (
    Corpus,
    CorpusItem,
    EmbeddingRole,
    EmbeddingSet,
    PairCandidate,
    PairDataset,
    PairRecord,
    Provenance,
    Split,
)

EMBEDDING_MAGIC = b"PRSM"
EMBEDDING_FORMAT_VERSION = 1
_ROLE_TO_BYTE = {EmbeddingRole.BASE: 0, EmbeddingRole.TEACHER: 1, EmbeddingRole.STUDENT: 2}
_BYTE_TO_ROLE = {v: k for k, v in _ROLE_TO_BYTE.items()}


def canonical_json(obj: Any) -> str:
    """Deterministic JSON used for digests and reproducible artifacts."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Corpus


def load_corpus(path) -> Corpus:
    """Load a line-delimited corpus, assigning dense ids in input order.

    The original key of each record (its ``key`` field, or its record
    ordinal when absent) is kept alongside the dense ids.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"corpus file not found: {path}")
    items: list[CorpusItem] = []
    keys: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {line_no}: malformed record: {exc}") from None
            if not isinstance(record, dict) or "text" not in record:
                raise ValidationError(f"{path}: line {line_no}: record must carry a 'text' field")
            text = str(record["text"]).strip()
            if not text:
                raise ValidationError(f"{path}: line {line_no}: empty text")
            label = record.get("label")
            key = record.get("key")
            keys.append(str(key) if key is not None else str(len(items)))
            items.append(
                CorpusItem(
                    id=len(items),
                    text=text,
                    gold_label=None if label is None else str(label),
                )
            )
    if not items:
        raise ValidationError(f"{path}: empty corpus file")
    try:
        return Corpus(items=tuple(items), original_keys=tuple(keys))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def save_corpus(corpus: Corpus, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for item, key in zip(corpus.items, corpus.original_keys):
            record: dict[str, Any] = {"text": item.text, "key": key}
            if item.gold_label is not None:
                record["label"] = item.gold_label
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Embeddings


def embedding_bytes(eset: EmbeddingSet) -> bytes:
    header = EMBEDDING_MAGIC + struct.pack(
        "<BBQQ", EMBEDDING_FORMAT_VERSION, _ROLE_TO_BYTE[eset.role], eset.dim, len(eset)
    )
    body = eset.vectors.astype("<f4").tobytes(order="C")
    ids = eset.item_ids.astype("<u8").tobytes()
    return header + body + ids


def embedding_digest(eset: EmbeddingSet) -> str:
    return hashlib.sha256(embedding_bytes(eset)).hexdigest()


def save_embeddings(eset: EmbeddingSet, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(embedding_bytes(eset))


def load_embeddings(path) -> EmbeddingSet:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"embedding file not found: {path}")
    blob = path.read_bytes()
    head_size = 4 + struct.calcsize("<BBQQ")
    if len(blob) < head_size:
        raise ValidationError(f"{path}: truncated payload (header incomplete)")
    if blob[:4] != EMBEDDING_MAGIC:
        raise ValidationError(f"{path}: bad magic bytes {blob[:4]!r}")
    version, role_byte, dim, count = struct.unpack("<BBQQ", blob[4:head_size])
    if version != EMBEDDING_FORMAT_VERSION:
        raise ValidationError(f"{path}: unsupported format version {version}")
    if role_byte not in _BYTE_TO_ROLE:
        raise ValidationError(f"{path}: unknown role byte {role_byte}")
    if dim == 0 or count == 0:
        raise ValidationError(f"{path}: dim and count must be positive")
    expected = head_size + count * dim * 4 + count * 8
    if len(blob) < expected:
        raise ValidationError(f"{path}: truncated payload ({len(blob)} < {expected} bytes)")
    if len(blob) > expected:
        raise ValidationError(f"{path}: unexpected trailing bytes")
    vec32 = np.frombuffer(blob, dtype="<f4", count=count * dim, offset=head_size)
    ids = np.frombuffer(blob, dtype="<u8", count=count, offset=head_size + count * dim * 4)
    vectors = vec32.reshape(count, dim).astype(np.float64)
    if not np.all(np.isfinite(vectors)):
        raise ValidationError(f"{path}: non-finite values in payload")
    if np.any(ids >= np.iinfo(np.int64).max):
        raise ValidationError(f"{path}: item id out of range")
    try:
        return EmbeddingSet(
            role=_BYTE_TO_ROLE[role_byte],
            vectors=vectors,
            item_ids=ids.astype(np.int64),
        )
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Pair datasets and candidates


def _pair_record_obj(rec: PairRecord) -> dict[str, Any]:
    obj: dict[str, Any] = {"i": rec.i, "j": rec.j, "y": rec.y}
    if rec.base_sim is not None:
        obj["base_sim"] = rec.base_sim
    return obj


def pair_dataset_lines(dataset: PairDataset) -> list[str]:
    header = {
        "kind": "pair-dataset",
        "provenance": dataset.provenance.value,
        "split": dataset.split.value,
        "band": None if dataset.band is None else list(dataset.band),
        "count": len(dataset),
    }
    lines = [json.dumps(header)]
    lines.extend(json.dumps(_pair_record_obj(rec)) for rec in dataset.records)
    return lines


def save_pair_dataset(dataset: PairDataset, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(pair_dataset_lines(dataset)) + "\n", encoding="utf-8")


def pair_dataset_digest(dataset: PairDataset) -> str:
    return sha256_text("\n".join(pair_dataset_lines(dataset)) + "\n")


def _read_jsonl(path: Path) -> list[Any]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {line_no}: malformed record: {exc}") from None
    return rows


def load_pair_dataset(path) -> PairDataset:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"pair dataset file not found: {path}")
    rows = _read_jsonl(path)
    if not rows:
        raise ValidationError(f"{path}: empty pair dataset file")
    header, body = rows[0], rows[1:]
    if not isinstance(header, dict) or header.get("kind") != "pair-dataset":
        raise ValidationError(f"{path}: missing pair-dataset header record")
    try:
        provenance = Provenance(header["provenance"])
        split = Split(header["split"])
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"{path}: bad header: {exc}") from None
    band = header.get("band")
    records = []
    for idx, obj in enumerate(body):
        if not isinstance(obj, dict) or "i" not in obj or "j" not in obj or "y" not in obj:
            raise ValidationError(f"{path}: record {idx} must carry i, j, y")
        records.append(
            PairRecord(
                i=int(obj["i"]),
                j=int(obj["j"]),
                y=float(obj["y"]),
                base_sim=None if obj.get("base_sim") is None else float(obj["base_sim"]),
            )
        )
    if "count" in header and header["count"] != len(records):
        raise ValidationError(
            f"{path}: header count {header['count']} != {len(records)} records"
        )
    try:
        return PairDataset(
            provenance=provenance,
            split=split,
            records=tuple(records),
            band=None if band is None else (float(band[0]), float(band[1])),
        )
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def save_pair_candidates(
    candidates: Sequence[PairCandidate], path, band: tuple[float, float] | None = None
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "kind": "pair-candidates",
        "band": None if band is None else list(band),
        "count": len(candidates),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for cand in candidates:
            obj: dict[str, Any] = {"i": cand.i, "j": cand.j}
            if cand.base_sim is not None:
                obj["base_sim"] = cand.base_sim
            fh.write(json.dumps(obj) + "\n")


def load_pair_candidates(path) -> tuple[list[PairCandidate], tuple[float, float] | None]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"pair candidates file not found: {path}")
    rows = _read_jsonl(path)
    if not rows:
        raise ValidationError(f"{path}: empty candidates file")
    header = rows[0]
    if not isinstance(header, dict) or header.get("kind") != "pair-candidates":
        raise ValidationError(f"{path}: missing pair-candidates header record")
    band = header.get("band")
    out = [
        PairCandidate(
            i=int(obj["i"]),
            j=int(obj["j"]),
            base_sim=None if obj.get("base_sim") is None else float(obj["base_sim"]),
        )
        for obj in rows[1:]
    ]
    return out, None if band is None else (float(band[0]), float(band[1]))
