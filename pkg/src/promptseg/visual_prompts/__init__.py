"""Visual prompt engineering: composition recipes and the alignment study."""

from .alignment import (
    AlignmentResult,
    alignment_delta,
    format_benchmark_table,
    highlighted_embedding,
    run_prompt_benchmark,
)
from .compose import (
    BEST_RECIPE_ID,
    BgBlur,
    BgIntensity,
    CompositionRecipe,
    Crop,
    GrayscaleDye,
    Outline,
    compose_prompt,
    expand_bbox,
    get_recipe,
    is_attention_strategy,
    registered_recipe_ids,
    registered_strategy_ids,
    tight_bbox,
)

__all__ = [
    "AlignmentResult",
    "BEST_RECIPE_ID",
    "BgBlur",
    "BgIntensity",
    "CompositionRecipe",
    "Crop",
    "GrayscaleDye",
    "Outline",
    "alignment_delta",
    "compose_prompt",
    "expand_bbox",
    "format_benchmark_table",
    "get_recipe",
    "highlighted_embedding",
    "is_attention_strategy",
    "registered_recipe_ids",
    "registered_strategy_ids",
    "run_prompt_benchmark",
    "tight_bbox",
]
