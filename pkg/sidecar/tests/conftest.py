import json

import pytest


@pytest.fixture(scope="session")
def tiny_bert_dir(tmp_path_factory):
    """Randomly initialized BERT-style checkpoint with a wordpiece vocab."""
    import torch
    import transformers
    from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors

    out = tmp_path_factory.mktemp("tiny-bert")
    words = list(
        dict.fromkeys(
            ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
            + list("abcdefghijklmnopqrstuvwxyz")
            + "the an dog cat man woman car bus on in couch red blue green near ##s ##ing holding wearing".split()
        )
    )
    wp = Tokenizer(
        models.WordPiece(
            vocab={w: i for i, w in enumerate(words)}, unk_token="[UNK]"
        )
    )
    wp.normalizer = normalizers.BertNormalizer(lowercase=True)
    wp.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    wp.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        special_tokens=[("[CLS]", 2), ("[SEP]", 3)],
    )
    transformers.PreTrainedTokenizerFast(
        tokenizer_object=wp,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    ).save_pretrained(out)
    torch.manual_seed(1234)
    config = transformers.BertConfig(
        vocab_size=len(words),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    transformers.BertModel(config).save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def tiny_clip_dir(tmp_path_factory):
    """Randomly initialized CLIP-text checkpoint with a character-level BPE."""
    import torch
    import transformers
    from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors

    out = tmp_path_factory.mktemp("tiny-clip")
    chars = [chr(c) for c in range(ord("a"), ord("z") + 1)] + [str(d) for d in range(10)]
    vocab = {"<|startoftext|>": 0, "<|endoftext|>": 1}
    for ch in chars:
        vocab[ch] = len(vocab)
        vocab[ch + "</w>"] = len(vocab)
    bpe = Tokenizer(
        models.BPE(vocab=vocab, merges=[], end_of_word_suffix="</w>", unk_token="<|endoftext|>")
    )
    bpe.normalizer = normalizers.Lowercase()
    bpe.pre_tokenizer = pre_tokenizers.Whitespace()
    bpe.post_processor = processors.TemplateProcessing(
        single="<|startoftext|> $A <|endoftext|>",
        special_tokens=[("<|startoftext|>", 0), ("<|endoftext|>", 1)],
    )
    transformers.PreTrainedTokenizerFast(
        tokenizer_object=bpe,
        bos_token="<|startoftext|>",
        eos_token="<|endoftext|>",
        unk_token="<|endoftext|>",
        pad_token="<|endoftext|>",
    ).save_pretrained(out)
    torch.manual_seed(4321)
    config = transformers.CLIPTextConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=77,
        projection_dim=24,
        bos_token_id=0,
        eos_token_id=1,
    )
    transformers.CLIPTextModelWithProjection(config).save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def head_fixture():
    from pathlib import Path

    path = Path(__file__).parent / "data" / "head_fixture.json"
    return json.loads(path.read_text(encoding="utf-8"))
