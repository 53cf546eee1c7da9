"""HTTP surface for the boundary scorer.

POST /score  {"blocks": [...]} -> {"probs": [...]} with len(probs) =
len(blocks) - 1; 422 on empty blocks, 413 when the tokenized request exceeds
the capacity, 500 on model failure. GET /health reports readiness, model id,
and capacity. One model execution runs at a time per worker.
"""

from __future__ import annotations

import logging
import os
import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .model import BoundaryScorer, ModelConfig, load_checkpoint

logger = logging.getLogger(__name__)


class ScoreRequest(BaseModel):
    blocks: list[str] = Field(min_length=1)


class ScoreResponse(BaseModel):
    probs: list[float]


class HealthResponse(BaseModel):
    status: str
    model_id: str
    capacity_tokens: int


def create_app(
    config: ModelConfig | None = None,
    checkpoint_path: str | None = None,
) -> FastAPI:
    if checkpoint_path:
        scorer = load_checkpoint(checkpoint_path)  # missing file fails startup
    else:
        scorer = BoundaryScorer(config)
    capacity = scorer.config.capacity_tokens
    inference_lock = threading.Lock()

    app = FastAPI(title="scorer-service", version="0.1.0")
    app.state.scorer = scorer

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(
            status="ok", model_id=scorer.config.model_id, capacity_tokens=capacity
        )

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest):
        total = scorer.token_count(request.blocks)
        if total > capacity:
            raise HTTPException(
                status_code=413,
                detail=f"request holds {total} tokens, capacity is {capacity}",
            )
        try:
            with inference_lock:
                probs = scorer.score(request.blocks)
        except Exception as exc:  # model failure is a 500, not a validation error
            logger.exception("model failure")
            raise HTTPException(status_code=500, detail=f"model failure: {exc}") from exc
        return ScoreResponse(probs=probs)

    return app


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="scorer-service", description="Serve the boundary scorer over HTTP.")
    parser.add_argument("--host", default=os.environ.get("SCORER_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("SCORER_PORT", "8500")))
    parser.add_argument("--checkpoint", default=os.environ.get("SCORER_CHECKPOINT"),
                        help="model checkpoint to load; omitted = random initialization")
    args = parser.parse_args()

    app = create_app(checkpoint_path=args.checkpoint)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
