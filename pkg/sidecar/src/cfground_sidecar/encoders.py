"""Transformer text encoders behind one embedding call.

Two families: ``masked_lm`` (BERT-style, pooled over final-layer token
states) and ``contrastive_multimodal`` (CLIP-style, using the model's
designated sentence representation — the projected pooled output when the
checkpoint provides one). Inference runs in eval mode with no grad, so a
session is deterministic for identical text.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MASKED_LM = "masked_lm"
CONTRASTIVE = "contrastive_multimodal"
FAMILIES = (MASKED_LM, CONTRASTIVE)

MEAN_TOKENS = "mean_tokens"
FIRST_TOKEN = "first_token"
POOLINGS = (MEAN_TOKENS, FIRST_TOKEN)


@dataclass(frozen=True)
class EncoderSpec:
    family: str
    checkpoint: str
    pooling: str = MEAN_TOKENS

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.pooling not in POOLINGS:
            raise ValueError(f"unknown pooling {self.pooling!r}")


class TextEncoder:
    """Loads a checkpoint once and embeds batches of normalized text."""

    def __init__(self, spec: EncoderSpec, batch_size: int = 64):
        import torch
        import transformers

        self.spec = spec
        self.batch_size = batch_size
        self._torch = torch
        self.tokenizer = transformers.AutoTokenizer.from_pretrained(spec.checkpoint)
        config = transformers.AutoConfig.from_pretrained(spec.checkpoint)
        model_cls = None
        for arch in getattr(config, "architectures", None) or []:
            model_cls = getattr(transformers, arch, None)
            if model_cls is not None:
                break
        if model_cls is None:
            model_cls = transformers.AutoModel
        self.model = model_cls.from_pretrained(spec.checkpoint).eval()
        probe = self._forward(["probe"])
        self.dimension = int(probe.shape[1])

    @property
    def name(self) -> str:
        base = Path(self.spec.checkpoint).name or self.spec.checkpoint
        return f"{self.spec.family}:{base}:{self.spec.pooling}"

    def _forward(self, texts: Sequence[str]) -> np.ndarray:
        torch = self._torch
        enc = self.tokenizer(
            list(texts), return_tensors="pt", padding=True, truncation=True
        )
        with torch.no_grad():
            out = self.model(**enc)
        text_embeds = getattr(out, "text_embeds", None)
        if self.spec.family == CONTRASTIVE and text_embeds is not None:
            pooled = text_embeds
        elif self.spec.family == CONTRASTIVE and getattr(out, "pooler_output", None) is not None:
            pooled = out.pooler_output
        else:
            hidden = out.last_hidden_state
            if self.spec.pooling == FIRST_TOKEN:
                pooled = hidden[:, 0, :]
            else:
                mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
                pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        return pooled.cpu().numpy().astype(np.float32)

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        """float32 array [len(texts), dimension], in input order."""
        chunks = [
            self._forward(texts[i : i + self.batch_size])
            for i in range(0, len(texts), self.batch_size)
        ]
        return np.concatenate(chunks, axis=0) if chunks else np.zeros((0, self.dimension), np.float32)
