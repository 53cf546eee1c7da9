"""chunkforge: semantic chunking for long documents plus fused-vector retrieval."""

__version__ = "0.1.0"

from .blocks import Block, Document, import_wiki727k, split_sentences
from .chunking import Chunk, ChunkerConfig, chunk_document, merge_short, split_long, threshold_segment
from .config import RunConfig, load_config
from .errors import (
    CapacityExceededError,
    ChunkforgeError,
    ConfigError,
    DimensionMismatchError,
    EmptyDocumentError,
    InputError,
    ScorerError,
    ScorerProtocolError,
    ScorerTransportError,
)
from .evaluation import EvalReport, binarize, boundary_metrics, corpus_metrics
from .fusion import FusedVector, average_similarity, corrected_score, extend, fuse
from .index import FusedIndex, IndexEntry
from .scoring import BoundaryProbs, FileScorer, MockScorer, RemoteScorer, Scorer, ScorerConfig, build_scorer
from .tokenizers import Tokenizer, WhitespaceTokenizer, get_tokenizer, register_tokenizer
from .windows import WindowPlan, fuse_probs, plan_windows, score_document

__all__ = [
    "Block",
    "BoundaryProbs",
    "CapacityExceededError",
    "Chunk",
    "ChunkerConfig",
    "ChunkforgeError",
    "ConfigError",
    "DimensionMismatchError",
    "Document",
    "EmptyDocumentError",
    "EvalReport",
    "FileScorer",
    "FusedIndex",
    "FusedVector",
    "IndexEntry",
    "InputError",
    "MockScorer",
    "RemoteScorer",
    "RunConfig",
    "Scorer",
    "ScorerConfig",
    "ScorerError",
    "ScorerProtocolError",
    "ScorerTransportError",
    "Tokenizer",
    "WhitespaceTokenizer",
    "WindowPlan",
    "average_similarity",
    "binarize",
    "boundary_metrics",
    "build_scorer",
    "chunk_document",
    "corpus_metrics",
    "corrected_score",
    "extend",
    "fuse",
    "fuse_probs",
    "get_tokenizer",
    "import_wiki727k",
    "load_config",
    "merge_short",
    "plan_windows",
    "register_tokenizer",
    "score_document",
    "split_long",
    "split_sentences",
    "threshold_segment",
]
