from __future__ import annotations

from duplication.evaluation.synthetic import generate_synthetic, write_synthetic
from duplication.run_config import RunConfig


def cmd_synth(config: RunConfig) -> dict:
    """Write a scripted fixture: labeled_pairs.jsonl, embeddings.jsonl, corpus.jsonl."""
    fixture = generate_synthetic(config.n_seeds, config.variants, config.n_controls, config.seed)
    paths = write_synthetic(fixture, config.output_dir)
    return {
        "messages": len(fixture.corpus),
        "pairs": len(fixture.pairs),
        "files": {name: path.name for name, path in paths.items()},
    }


__all__ = ["cmd_synth"]
