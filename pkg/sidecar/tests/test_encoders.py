import numpy as np
import pytest

from cfground_sidecar.encoders import EncoderSpec, TextEncoder


class TestEncoderSpec:
    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError):
            EncoderSpec(family="diffusion", checkpoint="x")

    def test_rejects_unknown_pooling(self):
        with pytest.raises(ValueError):
            EncoderSpec(family="masked_lm", checkpoint="x", pooling="max")


class TestMaskedLmEncoder:
    @pytest.fixture(scope="class")
    def encoder(self, tiny_bert_dir):
        return TextEncoder(EncoderSpec(family="masked_lm", checkpoint=str(tiny_bert_dir)))

    def test_dimension_probed(self, encoder):
        assert encoder.dimension == 32

    def test_deterministic_within_session(self, encoder):
        a = encoder.encode(["the dog on the couch"])
        b = encoder.encode(["the dog on the couch"])
        assert np.array_equal(a, b)

    def test_batching_keeps_order(self, encoder):
        batch = encoder.encode(["red car", "blue bus", "green dog"])
        singles = [encoder.encode([t])[0] for t in ("red car", "blue bus", "green dog")]
        for got, want in zip(batch, singles):
            assert np.allclose(got, want, atol=1e-5)

    def test_distinct_texts_distinct_vectors(self, encoder):
        v = encoder.encode(["the dog", "the cat"])
        assert not np.array_equal(v[0], v[1])

    def test_first_token_pooling_differs(self, tiny_bert_dir):
        mean_enc = TextEncoder(
            EncoderSpec(family="masked_lm", checkpoint=str(tiny_bert_dir), pooling="mean_tokens")
        )
        cls_enc = TextEncoder(
            EncoderSpec(family="masked_lm", checkpoint=str(tiny_bert_dir), pooling="first_token")
        )
        text = ["the dog on the couch"]
        assert not np.array_equal(mean_enc.encode(text), cls_enc.encode(text))

    def test_name_carries_family_and_pooling(self, encoder):
        assert encoder.name.startswith("masked_lm:")
        assert encoder.name.endswith(":mean_tokens")


class TestContrastiveEncoder:
    @pytest.fixture(scope="class")
    def encoder(self, tiny_clip_dir):
        return TextEncoder(
            EncoderSpec(family="contrastive_multimodal", checkpoint=str(tiny_clip_dir))
        )

    def test_uses_projected_sentence_representation(self, encoder):
        # projection_dim of the fixture checkpoint, not its hidden size
        assert encoder.dimension == 24

    def test_deterministic(self, encoder):
        a = encoder.encode(["dog on couch"])
        b = encoder.encode(["dog on couch"])
        assert np.array_equal(a, b)

    def test_float32_output(self, encoder):
        assert encoder.encode(["dog"]).dtype == np.float32
