import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phonebench.dataset import (Annotation, AnnotationSet, AudioBuffer, Corpus,
                                DatasetStats, PhonemeInventory, SynthSpec, class_counts,
                                default_spec, generate_synthetic_dataset, load_manifest,
                                read_wav, resample_linear, slice_full_segment,
                                slice_window, window_length, write_manifest, write_wav)
from phonebench.dataset.audio import time_to_index
from phonebench.dataset.synth import apportion, with_n
from phonebench.exceptions import (DataError, FormatError, InventoryError, PaddingWarning,
                                   ParseError, RangeError)

SR = 44100


# inventory ----------------------------------------------------------------

def test_default_inventory_shape(default_inventory):
    inv = default_inventory
    assert len(inv) == 33
    assert inv.silence_label == "SIL"
    sizes = {f"{c}/{s}": len(inv.labels_in(c, s)) for c, s in inv.subgroups()}
    assert sizes == {"vowel/rounded": 2, "vowel/unrounded": 8,
                     "consonant/affricate": 1, "consonant/approximant": 4,
                     "consonant/fricative": 3, "consonant/nasal": 3,
                     "consonant/plosive": 8, "consonant/trill": 3}


def test_inventory_tsv_round_trip(tmp_path, default_inventory):
    path = tmp_path / "inv.tsv"
    default_inventory.to_tsv(path)
    assert PhonemeInventory.from_tsv(path) == default_inventory


def test_inventory_bad_row_reports_line(tmp_path):
    path = tmp_path / "inv.tsv"
    path.write_text("label\tcategory\tsubgroup\na\tvowel\tunrounded\nx\tvowel\tsquare\n")
    with pytest.raises(InventoryError) as err:
        PhonemeInventory.from_tsv(path)
    assert err.value.line == 3


def test_inventory_needs_one_silence(tmp_path):
    path = tmp_path / "inv.tsv"
    path.write_text("label\tcategory\tsubgroup\na\tvowel\tunrounded\n")
    with pytest.raises(InventoryError):
        PhonemeInventory.from_tsv(path)


def test_subset_keeps_silence(default_inventory):
    sub = default_inventory.subset(["a", "i"])
    assert sub.labels == ["i", "a", "SIL"]  # parent order, not argument order


# windows ------------------------------------------------------------------

def test_window_length_at_reference_rate():
    assert window_length(SR) == 1102


@pytest.mark.parametrize("t, expected", [
    (0.0, 0), (1.0, 44100), (0.5 / SR, 1), (1.49 / SR, 1), (2.5 / SR, 3),
])
def test_time_to_index_rounds_half_up(t, expected):
    assert time_to_index(t, SR) == expected


def test_slice_window_pads_past_eof():
    audio = AudioBuffer(np.linspace(-0.5, 0.5, 1500))
    w = slice_window(audio, Annotation("x", 1000 / SR, 1200 / SR, "a"))
    assert w.shape == (1102,)
    np.testing.assert_array_equal(w[:500], audio.samples[1000:])
    assert not w[500:].any()


def test_slice_window_start_outside_audio():
    audio = AudioBuffer(np.zeros(100))
    with pytest.raises(RangeError):
        slice_window(audio, Annotation("x", 200 / SR, 300 / SR, "a"))


def test_full_segment_warns_when_padded():
    audio = AudioBuffer(np.full(100, 0.25))
    with pytest.warns(PaddingWarning):
        seg = slice_full_segment(audio, Annotation("x", 50 / SR, 150 / SR, "a"))
    assert seg.shape == (100,)
    assert (seg[:50] == 0.25).all() and not seg[50:].any()


@settings(max_examples=50, deadline=None)
@given(start=st.integers(0, 5000), n=st.integers(1200, 8000))
def test_window_always_has_fixed_length(start, n):
    audio = AudioBuffer(np.zeros(n))
    if start >= n:
        return
    w = slice_window(audio, Annotation("x", start / SR, (start + 1) / SR, "a"))
    assert w.shape == (1102,)


# wav ----------------------------------------------------------------------

def test_wav_round_trip_is_pcm_exact(tmp_path, rng):
    samples = np.round(rng.uniform(-0.9, 0.9, 2000) * 32768) / 32768
    write_wav(tmp_path / "a.wav", AudioBuffer(samples))
    back = read_wav(tmp_path / "a.wav")
    assert back.sample_rate == SR
    np.testing.assert_array_equal(back.samples, samples)


def test_wav_rejects_other_rate_unless_resampling(tmp_path):
    write_wav(tmp_path / "a.wav", AudioBuffer(np.zeros(160), 16000))
    with pytest.raises(FormatError):
        read_wav(tmp_path / "a.wav")
    back = read_wav(tmp_path / "a.wav", resample=True)
    assert back.sample_rate == SR
    assert len(back) == round(160 * SR / 16000)


def test_wav_rejects_garbage(tmp_path):
    (tmp_path / "x.wav").write_bytes(b"not a wav at all")
    with pytest.raises(FormatError):
        read_wav(tmp_path / "x.wav")


def test_resample_linear_preserves_a_ramp():
    x = np.linspace(0, 1, 101)
    y = resample_linear(x, 100, 200)
    np.testing.assert_allclose(y[::2], x, atol=1e-12)


def test_audio_rejects_out_of_range():
    with pytest.raises(RangeError):
        AudioBuffer(np.array([0.0, 1.5]))


# manifest -----------------------------------------------------------------

def _manifest(tmp_path, body):
    path = tmp_path / "m.tsv"
    path.write_text("audio_id\tstart_s\tend_s\tlabel\n" + body)
    return path


def test_manifest_round_trip(tmp_path, default_inventory):
    anns = AnnotationSet([Annotation("f", 0.1, 0.2, "a"),
                          Annotation("f", 0.0, 0.1, "SIL")], default_inventory)
    path = tmp_path / "m.tsv"
    write_manifest(path, anns)
    back = load_manifest(path)
    assert back == anns
    assert back.labels == ["SIL", "a"]  # sorted by (audio_id, start)


def test_manifest_unknown_label_names_line(tmp_path):
    path = _manifest(tmp_path, "f\t0.0\t0.1\ta\nf\t0.1\t0.2\tQQ\n")
    with pytest.raises(InventoryError) as err:
        load_manifest(path)
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_manifest_empty_range(tmp_path):
    with pytest.raises(RangeError):
        load_manifest(_manifest(tmp_path, "f\t0.2\t0.2\ta\n"))


def test_manifest_bad_number(tmp_path):
    with pytest.raises(ParseError) as err:
        load_manifest(_manifest(tmp_path, "f\tzero\t0.2\ta\n"))
    assert err.value.line == 2


def test_dataset_stats_fractions(default_inventory):
    stats = DatasetStats.from_labels(["a", "a", "p", "SIL"], default_inventory)
    assert stats.counts["a"] == 2 and stats.total == 4
    assert stats.category_fractions == {"vowel": 0.5, "consonant": 0.25, "silence": 0.25}
    assert math.isclose(sum(stats.category_fractions.values()), 1.0)


def test_corpus_loads_audio(four_class_dir):
    corpus = Corpus.load(four_class_dir / "manifest.tsv", four_class_dir / "inventory.tsv")
    assert len(corpus) == 400
    assert corpus.windows().shape == (400, 1102)


def test_corpus_missing_audio(tmp_path, default_inventory):
    path = _manifest(tmp_path, "nofile\t0.0\t0.1\ta\n")
    with pytest.raises(ParseError):
        Corpus.load(path)


# synthetic corpus ---------------------------------------------------------

def test_apportion_oracle():
    # frozen from hand arithmetic: quotas 2.5/2.5/5 over 10 -> ties to lowest index
    assert apportion([2.5, 2.5, 5.0], 10) == [3, 2, 5]
    assert apportion([1 / 3] * 3, 1) == [1, 0, 0]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 10.0), min_size=1, max_size=12))
def test_apportion_stays_within_one_of_quota(weights):
    total = 97
    s = sum(weights)
    quotas = [w / s * total for w in weights]
    counts = apportion(quotas, total)
    assert sum(counts) == total
    assert all(abs(c - q) < 1 + 1e-9 for c, q in zip(counts, quotas))


def test_default_spec_category_counts():
    spec = default_spec()
    inv = spec.inventory()
    counts = class_counts(spec)
    per_cat = {cat: sum(counts[l] for l in inv.labels_in(cat))
               for cat in ("vowel", "consonant", "silence")}
    # 39% / 47% / 14% of 2520
    assert per_cat == {"vowel": 983, "consonant": 1184, "silence": 353}
    assert sum(counts.values()) == 2520


@settings(max_examples=20, deadline=None)
@given(st.integers(33, 5000))
def test_class_counts_sum_and_share(n):
    spec = with_n(default_spec(), n)
    counts = class_counts(spec)
    assert sum(counts.values()) == n
    for c in spec.classes:
        assert abs(counts[c.label] - c.proportion * n) < 1 + 1e-9


def test_four_class_generation(four_class):
    audio, anns = four_class
    assert len(anns) == 400
    assert anns.stats.counts == {"a": 100, "i": 100, "s": 100, "SIL": 100}
    for a in anns:
        buf = audio[a.audio_id]
        assert time_to_index(a.end, SR) <= len(buf)


def test_synth_is_deterministic():
    spec = with_n(SynthSpec.load("four-class"), 40)
    a1, m1 = generate_synthetic_dataset(spec, 3)
    a2, m2 = generate_synthetic_dataset(spec, 3)
    assert m1 == m2
    assert all(np.array_equal(a1[k].samples, a2[k].samples) for k in a1)


def test_synth_spec_dump_round_trip(tmp_path):
    spec = SynthSpec.load("four-class")
    spec.dump(tmp_path / "s.toml")
    assert SynthSpec.load(tmp_path / "s.toml") == spec
