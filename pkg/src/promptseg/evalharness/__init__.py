"""Evaluation protocols, breakdowns, and the ablation runner."""

from .breakdown import (
    BREAKDOWN_KEYS,
    breakdown,
    build_episodes,
    format_ablation_table,
    run_ablation,
    size_bucket,
)
from .protocols import (
    best_threshold_for_model,
    eval_generalized,
    eval_one_shot,
    eval_referring,
    eval_zero_shot_multilabel,
    materialize_subsets,
    multilabel_map,
    predict_probabilities,
)

__all__ = [
    "BREAKDOWN_KEYS",
    "best_threshold_for_model",
    "breakdown",
    "build_episodes",
    "eval_generalized",
    "eval_one_shot",
    "eval_referring",
    "eval_zero_shot_multilabel",
    "format_ablation_table",
    "materialize_subsets",
    "multilabel_map",
    "predict_probabilities",
    "run_ablation",
    "size_bucket",
]
