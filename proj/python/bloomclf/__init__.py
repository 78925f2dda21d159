"""Question complexity metrics and Bloom-level classifiers."""

import json as _json

from ._core import (
    BloomclfError,
    __version__,
    class_distribution,
    compute_metrics,
    count_syllables,
    generate,
    is_content_word,
    load_corpus,
    predict,
    run_experiment_json,
    tokenize,
)

__all__ = [
    "BloomclfError",
    "__version__",
    "class_distribution",
    "compute_metrics",
    "count_syllables",
    "generate",
    "is_content_word",
    "load_corpus",
    "predict",
    "run_experiment",
    "run_experiment_json",
    "tokenize",
]


def run_experiment(name, corpus_path, seed=0, out_dir=""):
    """Run an experiment preset and return the structured report as a dict.

    When out_dir is given, the report/model/manifest artifacts are written
    there as well.
    """
    return _json.loads(run_experiment_json(name, corpus_path, seed, out_dir))
