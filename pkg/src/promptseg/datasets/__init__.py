"""Dataset construction: synthetic shapes, support/negative extension,
class removal, and generalized-prompt subsets."""

from .affordances import (
    PromptSubset,
    affordance_subsets,
    load_affordance_mapping,
    load_union_mask,
    union_mask_from_arrays,
)
from .class_removal import ClassRemovalList, filter_unseen_classes, pascal_folds
from .phrasecut_plus import (
    DEFAULT_PREFIXES,
    augment_phrase,
    build_phrasecut_plus,
    object_aware_crop,
)
from .records import LoadedSample, SampleRecord, load_sample, read_records, write_records
from .synthetic import COLORS, PHRASE_VOCAB, SHAPES, synth_dataset, synth_samples

__all__ = [
    "COLORS",
    "ClassRemovalList",
    "DEFAULT_PREFIXES",
    "LoadedSample",
    "PHRASE_VOCAB",
    "PromptSubset",
    "SHAPES",
    "SampleRecord",
    "affordance_subsets",
    "augment_phrase",
    "build_phrasecut_plus",
    "filter_unseen_classes",
    "load_affordance_mapping",
    "load_sample",
    "load_union_mask",
    "object_aware_crop",
    "pascal_folds",
    "read_records",
    "synth_dataset",
    "synth_samples",
    "union_mask_from_arrays",
    "write_records",
]
