import hashlib
import re

import numpy as np
import pytest

from promptseg.datasets import (
    PHRASE_VOCAB,
    ClassRemovalList,
    SampleRecord,
    affordance_subsets,
    augment_phrase,
    build_phrasecut_plus,
    filter_unseen_classes,
    load_affordance_mapping,
    load_sample,
    object_aware_crop,
    pascal_folds,
    read_records,
    synth_dataset,
    synth_samples,
    union_mask_from_arrays,
    write_records,
)
from promptseg.errors import ConfigurationError, InputError


# ---------------------------------------------------------------- synthetic


def test_synth_deterministic_per_seed():
    a = synth_samples(seed=3, n=10)
    b = synth_samples(seed=3, n=10)
    for x, y in zip(a, b):
        assert np.array_equal(x.image, y.image)
        assert np.array_equal(x.mask, y.mask)
        assert x.phrase == y.phrase
    c = synth_samples(seed=4, n=10)
    assert any(not np.array_equal(x.image, y.image) for x, y in zip(a, c))


def test_synth_dataset_byte_identical_on_disk(tmp_path):
    r1 = synth_dataset(tmp_path / "a", n=6, seed=9)
    r2 = synth_dataset(tmp_path / "b", n=6, seed=9)
    assert [x.phrase for x in r1] == [x.phrase for x in r2]
    for name in ("img_00000.png", "mask_00003.png", "index.jsonl"):
        ha = hashlib.sha256((tmp_path / "a" / name).read_bytes()).hexdigest()
        hb = hashlib.sha256((tmp_path / "b" / name).read_bytes()).hexdigest()
        assert ha == hb


def test_synth_positive_masks_nonempty_and_vocab_bounded():
    samples = synth_samples(seed=0, n=40)
    for s in samples:
        assert s.mask.any()
    assert {s.phrase for s in samples} <= set(PHRASE_VOCAB)
    assert len(PHRASE_VOCAB) <= 12


def test_synth_roundtrip_through_index(tmp_path):
    synth_dataset(tmp_path, n=4, seed=1)
    records = read_records(tmp_path / "index.jsonl")
    assert len(records) == 4
    sample = load_sample(records[0], root=tmp_path)
    assert sample.image.shape == (64, 64, 3)
    assert sample.mask.dtype == bool and sample.mask.any()


def test_synth_rejects_bad_n():
    with pytest.raises(InputError):
        synth_samples(seed=0, n=0)


# ------------------------------------------------------------------ PC+


def _toy_records():
    recs = []
    for i in range(6):
        phrase = "red circle" if i < 3 else "blue square"
        recs.append(
            SampleRecord(image=f"img{i}.png", phrase=phrase, mask=f"m{i}.png")
        )
    recs.append(SampleRecord(image="img6.png", phrase="lonely phrase", mask="m6.png"))
    return recs


def test_pcplus_no_negatives_at_qneg_zero():
    rng = np.random.default_rng(0)
    out = build_phrasecut_plus(_toy_records(), q_neg=0.0, rng=rng)
    assert not any(r.negative for r in out)
    assert [r.phrase for r in out] == [r.phrase for r in _toy_records()]


def test_pcplus_support_from_same_phrase_pool():
    rng = np.random.default_rng(1)
    records = _toy_records()
    out = build_phrasecut_plus(records, q_neg=0.0, rng=rng)
    image_to_phrase = {r.image: r.phrase for r in records}
    for rec in out:
        if rec.phrase == "lonely phrase":
            assert rec.support_image is None  # unique phrase: text only
        else:
            assert rec.support_image is not None
            assert rec.support_image != rec.image  # never its own support
            assert image_to_phrase[rec.support_image] == rec.phrase


def test_pcplus_negative_fraction_binomial_bound():
    rng = np.random.default_rng(7)
    records = [
        SampleRecord(image=f"i{k}.png", phrase=PHRASE_VOCAB[k % len(PHRASE_VOCAB)], mask=f"m{k}.png")
        for k in range(10_000)
    ]
    out = build_phrasecut_plus(records, q_neg=0.2, rng=rng)
    frac = sum(r.negative for r in out) / len(out)
    assert 0.18 <= frac <= 0.22
    for r in out:
        if r.negative:
            assert r.support_image is None and r.support_mask is None


def test_pcplus_negative_phrase_not_present_in_image():
    rng = np.random.default_rng(3)
    # two phrases share each image -> replacements must avoid both
    records = []
    for k in range(100):
        records.append(SampleRecord(image=f"i{k}.png", phrase="red circle", mask=f"a{k}.png"))
        records.append(SampleRecord(image=f"i{k}.png", phrase="blue square", mask=f"b{k}.png"))
        records.append(SampleRecord(image=f"j{k}.png", phrase="green triangle", mask=f"c{k}.png"))
    out = build_phrasecut_plus(records, q_neg=0.5, rng=rng)
    phrases_in_image = {}
    for rec in records:
        phrases_in_image.setdefault(rec.image, set()).add(rec.phrase)
    negatives = [r for r in out if r.negative]
    assert negatives
    for r in negatives:
        assert r.phrase not in phrases_in_image[r.image]


def test_pcplus_determinism_and_validation():
    records = _toy_records()
    a = build_phrasecut_plus(records, 0.3, np.random.default_rng(11))
    b = build_phrasecut_plus(records, 0.3, np.random.default_rng(11))
    assert a == b
    with pytest.raises(InputError):
        build_phrasecut_plus([], 0.2, np.random.default_rng(0))
    with pytest.raises(InputError):
        build_phrasecut_plus(records, 1.0, np.random.default_rng(0))


def test_negative_record_loads_all_zero_mask(tmp_path):
    records = synth_dataset(tmp_path, n=3, seed=0)
    neg = records[0].as_negative("blue square")
    sample = load_sample(neg, root=tmp_path)
    assert not sample.mask.any()
    assert sample.negative


# --------------------------------------------------------------- phrases


def test_augment_phrase_identity_registry():
    rng = np.random.default_rng(0)
    assert augment_phrase("dog", rng, prefixes=("",)) == "dog"


def test_augment_phrase_prefix_and_determinism():
    rng = np.random.default_rng(5)
    seq1 = [augment_phrase("dog", np.random.default_rng(5)) for _ in range(3)]
    seq2 = [augment_phrase("dog", np.random.default_rng(5)) for _ in range(3)]
    assert seq1 == seq2
    out = augment_phrase("dog", rng, prefixes=("a photo of a ",))
    assert out == "a photo of a dog"
    with pytest.raises(InputError):
        augment_phrase("", rng)


# ------------------------------------------------------------------ crops


def test_crop_full_window_identity():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
    mask = np.zeros((32, 32), dtype=bool)
    mask[4:12, 4:12] = True
    ci, cm = object_aware_crop(img, mask, (32, 32), rng)
    assert np.array_equal(ci, img) and np.array_equal(cm, mask)


def test_crop_keeps_object_fraction():
    # oracle: count mask pixels inside the window
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, (64, 64, 3), dtype=np.uint8)
    mask = np.zeros((64, 64), dtype=bool)
    mask[10:20, 10:20] = True
    total = mask.sum()
    for _ in range(1000):
        _, cm = object_aware_crop(img, mask, (24, 24), rng)
        assert cm.sum() >= 0.2 * total


def test_crop_negative_unconstrained_and_validation():
    rng = np.random.default_rng(2)
    img = np.zeros((16, 16, 3), dtype=np.uint8)
    empty = np.zeros((16, 16), dtype=bool)
    ci, cm = object_aware_crop(img, empty, (8, 8), rng)
    assert ci.shape == (8, 8, 3) and not cm.any()
    with pytest.raises(InputError):
        object_aware_crop(img, empty, (32, 8), rng)


def test_crop_fallback_centers_on_object(caplog):
    rng = np.random.default_rng(3)
    img = np.zeros((64, 64, 3), dtype=np.uint8)
    mask = np.ones((64, 64), dtype=bool)  # object fills the frame; 8x8 window
    with caplog.at_level("WARNING"):
        _, cm = object_aware_crop(img, mask, (8, 8), rng, min_object_fraction=0.9)
    assert cm.shape == (8, 8)
    assert any("fell back" in r.message for r in caplog.records)


# ---------------------------------------------------------- class removal


def test_removal_closure_includes_seed():
    removal = ClassRemovalList.from_vendored(["dog"])
    assert "dog" in removal.invalid_words
    assert "poodle" in removal.invalid_words


def test_removal_drops_hyponym_phrases():
    removal = ClassRemovalList.from_vendored(["dog"])
    records = [
        SampleRecord(image="a.png", phrase="white poodle", mask="m.png"),
        SampleRecord(image="b.png", phrase="red fire hydrant", mask="m.png"),
        SampleRecord(image="c.png", phrase="Dog on grass", mask="m.png"),
        SampleRecord(image="d.png", phrase="hot dog bun", mask="m.png"),  # word match
        SampleRecord(image="e.png", phrase="dogma poster", mask="m.png"),  # no word match
    ]
    kept = filter_unseen_classes(records, removal)
    phrases = [r.phrase for r in kept]
    assert phrases == ["red fire hydrant", "dogma poster"]


def test_removal_soundness_exhaustive_scan():
    # oracle: independent whole-word scan over survivors
    removal = ClassRemovalList.from_vendored(["cat", "bird"])
    rng = np.random.default_rng(0)
    fillers = ["shiny", "broken", "left", "wooden", "tiny"]
    nouns = ["cat", "tabby", "owl", "lamp", "door", "pigeon", "kitten", "bus"]
    records = [
        SampleRecord(
            image=f"{i}.png",
            phrase=f"{fillers[rng.integers(5)]} {nouns[rng.integers(len(nouns))]}",
            mask="m.png",
        )
        for i in range(300)
    ]
    kept = filter_unseen_classes(records, removal)
    for rec in kept:
        words = set(re.findall(r"[a-z]+", rec.phrase.lower()))
        assert not words & removal.invalid_words


def test_removal_empty_list_is_identity():
    removal = ClassRemovalList.from_words([])
    records = _toy_records()
    assert filter_unseen_classes(records, removal) == records


def test_removal_unknown_seed_class():
    with pytest.raises(ConfigurationError):
        ClassRemovalList.from_vendored(["unobtainium"])


def test_pascal_folds_shape():
    folds = pascal_folds()
    assert len(folds["classes"]) == 20
    assert sorted(folds["zeroshot_splits"]["unseen-4"]) == sorted(
        ["aeroplane", "cow", "motorbike", "sofa"]
    )
    assert len(folds["zeroshot_splits"]["unseen-10"]) == 10


# ------------------------------------------------------------- affordances


def test_affordance_mapping_contents():
    mapping = load_affordance_mapping()
    assert len(mapping) == 8
    assert set(mapping["ride on"]["categories"]) == {"horse", "pony", "motorcycle"}
    assert "wheelchair" in mapping["has wheels"]["categories"]
    groups = {entry["group"] for entry in mapping.values()}
    assert groups == {"affordances", "attributes", "meronymy"}


def test_affordance_subsets_union_targets():
    records = [
        SampleRecord(image="i1.png", phrase="horse", mask="m1.png"),
        SampleRecord(image="i1.png", phrase="motorcycle", mask="m2.png"),
        SampleRecord(image="i2.png", phrase="lamp", mask="m3.png"),
        SampleRecord(image="i3.png", phrase="pony", mask="m4.png"),
    ]
    subsets = affordance_subsets(records)
    ride = next(s for s in subsets if s.prompt == "ride on")
    assert [item[0] for item in ride.items] == ["i1.png", "i3.png"]
    assert ride.items[0][1] == ["m1.png", "m2.png"]  # union over both members
    # image with zero mapped categories is excluded
    assert "i2.png" not in [item[0] for item in ride.items]


def test_affordance_subsets_unknown_category_listed():
    records = [SampleRecord(image="i.png", phrase="horse", mask="m.png")]
    with pytest.raises(ConfigurationError) as err:
        affordance_subsets(records, known_categories={"horse", "pony"})
    assert "motorcycle" in str(err.value)


def test_union_mask_from_arrays():
    a = np.zeros((4, 4), dtype=bool)
    b = np.zeros((4, 4), dtype=bool)
    a[0, 0] = True
    b[1, 1] = True
    u = union_mask_from_arrays([a, b])
    assert u.sum() == 2 and u[0, 0] and u[1, 1]


# ----------------------------------------------------------------- records


def test_records_jsonl_roundtrip(tmp_path):
    records = _toy_records()
    path = write_records(records, tmp_path / "index.jsonl")
    assert read_records(path) == records


def test_record_validation():
    with pytest.raises(InputError):
        SampleRecord(image="a.png", phrase="", mask="m.png")
