import hashlib
import json
import os

import numpy as np
import pytest

from selinet import schema
from selinet.data import (
    AES_SHAPE,
    BODY_SHAPE,
    Dataset,
    SampleRecord,
    derive_sentiment,
    load_annotations,
    read_feature_file,
    synth_dataset,
    write_feature_file,
)
from selinet.errors import (
    ArgumentError,
    FormatError,
    LabelError,
    SchemaError,
)
from selinet.postprocess import SentimentMap

SMAP = SentimentMap.default()
POS, NEG, NEU = (SMAP.sentiments.index(s) for s in ("positive", "negative", "neutral"))


class TestDeriveSentiment:
    def test_single_positive(self):
        hot = derive_sentiment(["Confidence"], SMAP)
        assert hot[POS] == 1 and hot.sum() == 1

    def test_single_negative(self):
        hot = derive_sentiment(["Sadness"], SMAP)
        assert hot[NEG] == 1 and hot.sum() == 1

    def test_union_of_mapped_sentiments(self):
        hot = derive_sentiment(["Confidence", "Sadness"], SMAP)
        assert hot[POS] == 1 and hot[NEG] == 1

    def test_same_sentiment_idempotent(self):
        one = derive_sentiment(["Sadness"], SMAP)
        two = derive_sentiment(["Sadness", "Fear"], SMAP)
        assert two[NEG] == 1 and two.sum() >= one.sum()

    def test_or_property_over_random_subsets(self):
        from selinet.numerics import Rng

        rng = Rng(6)
        for _ in range(50):
            k = 1 + rng.below(5)
            emos = [schema.EMOTIONS[j] for j in rng.permutation(26)[:k]]
            hot = derive_sentiment(emos, SMAP)
            want = np.zeros(3, dtype=np.int64)
            for e in emos:
                want |= derive_sentiment([e], SMAP)
            np.testing.assert_array_equal(hot, want)

    def test_empty_rejected(self):
        with pytest.raises(LabelError):
            derive_sentiment([], SMAP)


class TestFeatureFile:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "f.slnf"
        body = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
        aes = np.ones((1, 2, 2), dtype=np.float32)
        write_feature_file(path, {"body": body, "aesthetic": aes})
        maps = read_feature_file(path)
        assert set(maps) == {"body", "aesthetic"}
        np.testing.assert_array_equal(maps["body"], body)
        np.testing.assert_array_equal(maps["aesthetic"], aes)
        assert maps["body"].dtype == np.float32

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "f.slnf"
        write_feature_file(path, {})
        data = bytearray(path.read_bytes())
        import struct
        import zlib

        body = bytes(data[:-4])
        body = body[:4] + struct.pack("<H", 99) + body[6:]
        path.write_bytes(body + struct.pack("<I", zlib.crc32(body)))
        with pytest.raises(FormatError) as exc:
            read_feature_file(path)
        assert "version" in str(exc.value)

    def test_corrupted_payload(self, tmp_path):
        path = tmp_path / "f.slnf"
        write_feature_file(path, {"body": np.zeros((2, 2), dtype=np.float32)})
        data = bytearray(path.read_bytes())
        data[12] ^= 0x55
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            read_feature_file(path)


def _write_valid(tmp_path, lines):
    for name in ("a.slnf", "b.slnf"):
        write_feature_file(
            tmp_path / name,
            {
                "body": np.zeros(BODY_SHAPE, dtype=np.float32),
                "aesthetic": np.zeros(AES_SHAPE, dtype=np.float32),
            },
        )
    path = tmp_path / "ann.jsonl"
    path.write_text("\n".join(json.dumps(obj) for obj in lines) + "\n")
    return path


class TestLoadAnnotations:
    def _line(self, **overrides):
        obj = {
            "id": "a",
            "split": "train",
            "features": "a.slnf",
            "emotions": ["Peace"],
        }
        obj.update(overrides)
        return obj

    def test_valid_file(self, tmp_path):
        path = _write_valid(
            tmp_path,
            [
                self._line(),
                self._line(id="b", split="val", features="b.slnf",
                           emotions=["Anger", "Fear"]),
            ],
        )
        ds = load_annotations(path)
        assert [r.id for r in ds.split("train")] == ["a"]
        rec = ds.split("val")[0]
        assert rec.emotions == ["Anger", "Fear"]
        np.testing.assert_array_equal(rec.sentiment, derive_sentiment(rec.emotions, SMAP))
        # relative feature paths resolve against the annotation file
        assert os.path.isabs(rec.features_path)
        body, aes = ds.features(rec)
        assert body.shape == BODY_SHAPE and aes.shape == AES_SHAPE
        ye, ys = ds.labels(rec)
        assert ye.sum() == 2 and ye[schema.EMOTIONS.index("Anger")] == 1

    def test_blank_lines_skipped(self, tmp_path):
        path = _write_valid(tmp_path, [self._line()])
        path.write_text(path.read_text() + "\n\n")
        assert len(load_annotations(path).split("train")) == 1

    def test_duplicate_id(self, tmp_path):
        path = _write_valid(tmp_path, [self._line(), self._line()])
        with pytest.raises(SchemaError):
            load_annotations(path)

    def test_bad_json_reports_line(self, tmp_path):
        path = _write_valid(tmp_path, [self._line()])
        path.write_text(path.read_text() + "{not json\n")
        with pytest.raises(FormatError) as exc:
            load_annotations(path)
        assert exc.value.offset == 2

    def test_missing_key(self, tmp_path):
        obj = self._line()
        del obj["split"]
        with pytest.raises(FormatError):
            load_annotations(_write_valid(tmp_path, [obj]))

    def test_unknown_key(self, tmp_path):
        with pytest.raises(FormatError) as exc:
            load_annotations(_write_valid(tmp_path, [self._line(extra=1)]))
        assert "extra" in str(exc.value)

    def test_unknown_split(self, tmp_path):
        with pytest.raises(FormatError):
            load_annotations(_write_valid(tmp_path, [self._line(split="dev")]))

    def test_empty_emotions(self, tmp_path):
        with pytest.raises(LabelError):
            load_annotations(_write_valid(tmp_path, [self._line(emotions=[])]))

    def test_emotion_outside_schema(self, tmp_path):
        with pytest.raises(SchemaError):
            load_annotations(_write_valid(tmp_path, [self._line(emotions=["Joy"])]))

    def test_missing_tensor_in_feature_file(self, tmp_path):
        path = _write_valid(tmp_path, [self._line()])
        write_feature_file(
            tmp_path / "a.slnf", {"body": np.zeros(BODY_SHAPE, dtype=np.float32)}
        )
        ds = load_annotations(path)
        with pytest.raises(FormatError):
            ds.features(ds.split("train")[0])

    def test_unknown_split_lookup(self):
        with pytest.raises(ArgumentError):
            Dataset(emotions=list(schema.EMOTIONS), smap=SMAP).split("dev")


def _dir_digest(d):
    h = hashlib.sha256()
    for name in sorted(os.listdir(d)):
        h.update(name.encode())
        with open(os.path.join(d, name), "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


class TestSynthDataset:
    def test_byte_deterministic(self, tmp_path):
        synth_dataset(tmp_path / "a", seed=11, n_per_split=3)
        synth_dataset(tmp_path / "b", seed=11, n_per_split=3)
        assert _dir_digest(tmp_path / "a") == _dir_digest(tmp_path / "b")

    def test_seed_changes_bytes(self, tmp_path):
        synth_dataset(tmp_path / "a", seed=11, n_per_split=2)
        synth_dataset(tmp_path / "b", seed=12, n_per_split=2)
        assert _dir_digest(tmp_path / "a") != _dir_digest(tmp_path / "b")

    def test_loadable_and_sized(self, tmp_path):
        ds = synth_dataset(tmp_path / "ds", seed=1, n_per_split=4)
        for split in ("train", "val", "test"):
            assert len(ds.split(split)) == 4
        rec = ds.split("train")[0]
        body, aes = ds.features(rec)
        assert body.shape == BODY_SHAPE and aes.shape == AES_SHAPE
        assert rec.emotions and all(e in schema.EMOTIONS for e in rec.emotions)

    def test_zero_separability_gives_pure_noise_and_multi_labels(self, tmp_path):
        ds = synth_dataset(tmp_path / "ds", seed=2, n_per_split=4, separability=0.0)
        recs = [r for s in ("train", "val", "test") for r in ds.split(s)]
        # multi-label probability is 1 at separability 0
        assert all(len(r.emotions) >= 2 for r in recs)

    def test_high_separability_gives_single_labels(self, tmp_path):
        ds = synth_dataset(tmp_path / "ds", seed=2, n_per_split=4, separability=10.0)
        recs = [r for s in ("train", "val", "test") for r in ds.split(s)]
        assert all(len(r.emotions) == 1 for r in recs)

    def test_argument_validation(self, tmp_path):
        with pytest.raises(ArgumentError):
            synth_dataset(tmp_path / "x", seed=1, n_per_split=0)
        with pytest.raises(ArgumentError):
            synth_dataset(tmp_path / "x", seed=1, n_per_split=2, separability=-1.0)
