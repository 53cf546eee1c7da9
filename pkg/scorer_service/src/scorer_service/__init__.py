"""Boundary-scoring HTTP service."""

from .app import create_app
from .model import BoundaryScorer, HashTokenizer, ModelConfig, load_checkpoint

__all__ = ["BoundaryScorer", "HashTokenizer", "ModelConfig", "create_app", "load_checkpoint"]
