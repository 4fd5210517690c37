"""Visit-sequence encoder: embeddings, per-visit pooling, transformer, head.

Per patient: each visit's token embeddings are pooled by variable-size
attention, the pooled vector gets a sinusoidal encoding of the visit's age
added, the visit sequence runs through pre-norm transformer layers and is
mean-pooled, the static features are projected through a tanh layer, and a
final affine head maps the concatenation to the scalar risk score s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .features import EncodedPatient
from .layers import (
    Dense,
    Embedding,
    TransformerLayer,
    VariableAttentionPool,
    time_encoding,
)


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    static_dim: int
    d_model: int = 32
    n_heads: int = 2
    n_layers: int = 1
    ffn_hidden: int = 64
    static_proj: int = 16
    max_visits: int = 32

    def __post_init__(self) -> None:
        if self.vocab_size < 1 or self.static_dim < 1:
            raise ConfigError("vocab_size and static_dim must be positive")
        if self.d_model % 2 != 0:
            raise ConfigError("d_model must be even (paired sin/cos time encoding)")
        if self.d_model % self.n_heads != 0:
            raise ConfigError("n_heads must divide d_model")
        if min(self.n_layers, self.ffn_hidden, self.static_proj, self.max_visits) < 1:
            raise ConfigError("n_layers, ffn_hidden, static_proj, max_visits must be >= 1")

    def to_dict(self) -> dict:
        return {
            "vocab_size": self.vocab_size,
            "static_dim": self.static_dim,
            "d_model": self.d_model,
            "n_heads": self.n_heads,
            "n_layers": self.n_layers,
            "ffn_hidden": self.ffn_hidden,
            "static_proj": self.static_proj,
            "max_visits": self.max_visits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**{k: int(v) for k, v in d.items()})


class RiskEncoder:
    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        d = config.d_model
        self.embed = Embedding(config.vocab_size, d, rng)
        self.pool = VariableAttentionPool(d, rng)
        self.layers = [TransformerLayer(d, config.n_heads, config.ffn_hidden, rng) for _ in range(config.n_layers)]
        self.static_proj = Dense(config.static_dim, config.static_proj, rng)
        self.head = Dense(d + config.static_proj, 1, rng)
        self._modules = {
            "embed": self.embed,
            "pool": self.pool,
            **{f"layer{i}": layer for i, layer in enumerate(self.layers)},
            "static_proj": self.static_proj,
            "head": self.head,
        }

    # -- parameter registry ---------------------------------------------------

    def params(self) -> dict[str, np.ndarray]:
        return {f"{m}.{n}": arr for m, mod in self._modules.items() for n, arr in mod.p.items()}

    def grads(self) -> dict[str, np.ndarray]:
        return {f"{m}.{n}": arr for m, mod in self._modules.items() for n, arr in mod.g.items()}

    def zero_grad(self) -> None:
        for mod in self._modules.values():
            mod.zero_grad()

    # -- forward / backward -----------------------------------------------------

    def forward(self, sample: EncodedPatient):
        """Scalar risk score s for one patient, with the backward cache."""
        d = self.config.d_model
        pool_caches = []
        embed_caches = []
        rows = []
        for ids, dt in zip(sample.visit_token_ids, sample.visit_dts):
            e, ce = self.embed.forward(ids)
            v, cp = self.pool.forward(e)
            rows.append(v + time_encoding(float(dt), d))
            embed_caches.append(ce)
            pool_caches.append(cp)

        if rows:
            x = np.stack(rows)
            layer_caches = []
            for layer in self.layers:
                x, c = layer.forward(x)
                layer_caches.append(c)
            h = x.mean(axis=0)
            n_visits = x.shape[0]
        else:
            # no usable history: the sequence half contributes nothing
            h = np.zeros(d)
            layer_caches = []
            n_visits = 0

        proj_pre, cs = self.static_proj.forward(sample.static[None, :])
        proj = np.tanh(proj_pre)
        z = np.concatenate([h, proj[0]])[None, :]
        out, ch = self.head.forward(z)
        s = float(out[0, 0])
        cache = (embed_caches, pool_caches, layer_caches, n_visits, cs, proj, ch)
        return s, cache

    def backward(self, ds: float, cache) -> None:
        embed_caches, pool_caches, layer_caches, n_visits, cs, proj, ch = cache
        d = self.config.d_model
        dz = self.head.backward(np.array([[ds]]), ch)[0]
        dh, dproj = dz[:d], dz[d:]
        dpre = (dproj * (1.0 - proj[0] ** 2))[None, :]
        self.static_proj.backward(dpre, cs)

        if n_visits == 0:
            return
        dx = np.tile(dh / n_visits, (n_visits, 1))
        for layer, c in zip(reversed(self.layers), reversed(layer_caches)):
            dx = layer.backward(dx, c)
        for j in range(n_visits - 1, -1, -1):
            de = self.pool.backward(dx[j], pool_caches[j])
            self.embed.backward(de, embed_caches[j])
