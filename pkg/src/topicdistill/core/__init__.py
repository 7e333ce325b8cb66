from .io import (
    load_corpus,
    load_embeddings,
    load_pair_candidates,
    load_pair_dataset,
    save_corpus,
    save_embeddings,
    save_pair_candidates,
    save_pair_dataset,
)
from .types import (
    Corpus,
    CorpusItem,
    EmbeddingRole,
    EmbeddingSet,
    PairCandidate,
    PairDataset,
    PairRecord,
    Provenance,
    RunConfig,
    Split,
)
from .validation import normalize_rows

__all__ = [
    "Corpus",
    "CorpusItem",
    "EmbeddingRole",
    "EmbeddingSet",
    "PairCandidate",
    "PairDataset",
    "PairRecord",
    "Provenance",
    "RunConfig",
    "Split",
    "load_corpus",
    "load_embeddings",
    "load_pair_candidates",
    "load_pair_dataset",
    "normalize_rows",
    "save_corpus",
    "save_embeddings",
    "save_pair_candidates",
    "save_pair_dataset",
]
