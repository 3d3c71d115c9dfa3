"""Unseen-class removal via vendored hyponym closures.

The closure word lists live in data/hyponyms.json, generated once from a
lexical database and checked in, which freezes the split and removes the
runtime dependency.
"""

import json
import re
from dataclasses import dataclass
from importlib import resources

from ..errors import ConfigurationError


def _vendored_hyponyms():
    with resources.files("promptseg.data").joinpath("hyponyms.json").open() as fh:
        return json.load(fh)


@dataclass(frozen=True)
class ClassRemovalList:
    seed_classes: tuple
    invalid_words: frozenset  # hyponym closure, lowercase; seeds included

    @classmethod
    def from_vendored(cls, seed_classes):
        table = _vendored_hyponyms()
        missing = [c for c in seed_classes if c not in table]
        if missing:
            raise ConfigurationError(
                f"no vendored hyponym list for classes: {missing}; "
                f"known: {sorted(table)}"
            )
        words = set()
        for c in seed_classes:
            words.add(c.lower())
            words.update(w.lower() for w in table[c])
        return cls(tuple(seed_classes), frozenset(words))

    @classmethod
    def from_words(cls, seed_classes, extra_words=()):
        words = {c.lower() for c in seed_classes} | {w.lower() for w in extra_words}
        return cls(tuple(seed_classes), frozenset(words))

    def pattern(self):
        if not self.invalid_words:
            return None
        # longest terms first so multi-word entries match whole
        terms = sorted(self.invalid_words, key=len, reverse=True)
        return re.compile(r"\b(?:" + "|".join(re.escape(t) for t in terms) + r")\b")

    def matches(self, phrase):
        pat = self.pattern()
        return bool(pat and pat.search(phrase.lower()))


def filter_unseen_classes(records, removal):
    """Drop every record whose phrase contains any closure word
    (whole-word, case-insensitive)."""
    pat = removal.pattern()
    if pat is None:
        return list(records)
    return [rec for rec in records if not pat.search(rec.phrase.lower())]


def pascal_folds():
    with resources.files("promptseg.data").joinpath("pascal_folds.json").open() as fh:
        return json.load(fh)
