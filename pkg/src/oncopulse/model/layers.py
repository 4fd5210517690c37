"""Neural building blocks in plain numpy with hand-written backward passes.

Every module follows the same contract: ``forward`` returns ``(output,
cache)`` and ``backward(d_output, cache)`` returns the gradient with respect
to the input while accumulating parameter gradients in ``module.g``. All
math is float64. Caches are explicit so a module instance can be applied
several times inside one computation graph (the variable-size attention
pool runs once per visit).
"""

from __future__ import annotations

import math

import numpy as np


def softplus(x):
    return np.logaddexp(0.0, x)


def inv_softplus(y):
    # inverse of softplus for positive y
    return np.log(np.expm1(y))


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def relu(x):
    return np.maximum(0.0, x)


def softmax(a, axis=-1):
    m = np.max(a, axis=axis, keepdims=True)
    e = np.exp(a - m)
    return e / np.sum(e, axis=axis, keepdims=True)


def softmax_backward(alpha, dalpha, axis=-1):
    """Gradient through softmax: da_i = alpha_i * (dalpha_i - sum_k alpha_k dalpha_k)."""
    inner = np.sum(alpha * dalpha, axis=axis, keepdims=True)
    return alpha * (dalpha - inner)


def time_encoding(dt_days: float, d: int) -> np.ndarray:
    """Sinusoidal encoding of visit age in days.

    Dimension pairs (2i, 2i+1) hold sin and cos at geometrically spaced
    frequencies; dt of zero encodes to [0, 1, 0, 1, ...].
    """
    if d % 2 != 0:
        raise ValueError("time encoding needs an even dimension")
    i = np.arange(0, d, 2, dtype=float)
    angles = dt_days / np.power(10000.0, i / d)
    out = np.empty(d)
    out[0::2] = np.sin(angles)
    out[1::2] = np.cos(angles)
    return out


class Module:
    """Holds parameters in ``self.p`` and matching gradients in ``self.g``."""

    def __init__(self):
        self.p: dict[str, np.ndarray] = {}
        self.g: dict[str, np.ndarray] = {}

    def _add_param(self, name: str, value: np.ndarray) -> None:
        self.p[name] = value
        self.g[name] = np.zeros_like(value)

    def zero_grad(self) -> None:
        for v in self.g.values():
            v[...] = 0.0


class Dense(Module):
    """Affine map: y = x W + b for row-stacked inputs of shape (n, d_in)."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator):
        super().__init__()
        self._add_param("W", rng.normal(0.0, 1.0 / math.sqrt(d_in), (d_in, d_out)))
        self._add_param("b", np.zeros(d_out))

    def forward(self, x: np.ndarray):
        return x @ self.p["W"] + self.p["b"], x

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        x = cache
        self.g["W"] += x.T @ dy
        self.g["b"] += dy.sum(axis=0)
        return dy @ self.p["W"].T


class Embedding(Module):
    """Token id lookup table of shape (vocab, d)."""

    def __init__(self, vocab_size: int, d: int, rng: np.random.Generator):
        super().__init__()
        self._add_param("E", rng.normal(0.0, 0.1, (vocab_size, d)))

    def forward(self, ids: np.ndarray):
        return self.p["E"][ids], ids

    def backward(self, dout: np.ndarray, cache) -> None:
        # repeated ids must accumulate, hence the unbuffered add
        np.add.at(self.g["E"], cache, dout)


class LayerNorm(Module):
    def __init__(self, d: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self._add_param("gamma", np.ones(d))
        self._add_param("beta", np.zeros(d))

    def forward(self, x: np.ndarray):
        mu = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mu) * inv
        return self.p["gamma"] * xhat + self.p["beta"], (xhat, inv)

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        xhat, inv = cache
        self.g["gamma"] += (dy * xhat).sum(axis=0)
        self.g["beta"] += dy.sum(axis=0)
        dxhat = dy * self.p["gamma"]
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        return inv * (dxhat - m1 - xhat * m2)


class MultiHeadSelfAttention(Module):
    """Scaled dot-product self-attention over the visit sequence."""

    def __init__(self, d: int, n_heads: int, rng: np.random.Generator):
        super().__init__()
        if d % n_heads != 0:
            raise ValueError("d must divide evenly into heads")
        self.d = d
        self.h = n_heads
        self.dh = d // n_heads
        for name in ("Wq", "Wk", "Wv", "Wo"):
            self._add_param(name, rng.normal(0.0, 1.0 / math.sqrt(d), (d, d)))
        for name in ("bq", "bk", "bv", "bo"):
            self._add_param(name, np.zeros(d))

    def _split(self, x: np.ndarray) -> np.ndarray:
        # (n, d) -> (h, n, dh)
        n = x.shape[0]
        return x.reshape(n, self.h, self.dh).transpose(1, 0, 2)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        # (h, n, dh) -> (n, d)
        return x.transpose(1, 0, 2).reshape(-1, self.d)

    def forward(self, x: np.ndarray):
        q = self._split(x @ self.p["Wq"] + self.p["bq"])
        k = self._split(x @ self.p["Wk"] + self.p["bk"])
        v = self._split(x @ self.p["Wv"] + self.p["bv"])
        scores = q @ k.transpose(0, 2, 1) / math.sqrt(self.dh)
        attn = softmax(scores, axis=-1)
        ctx = self._merge(attn @ v)
        out = ctx @ self.p["Wo"] + self.p["bo"]
        return out, (x, q, k, v, attn, ctx)

    def backward(self, dout: np.ndarray, cache) -> np.ndarray:
        x, q, k, v, attn, ctx = cache
        self.g["Wo"] += ctx.T @ dout
        self.g["bo"] += dout.sum(axis=0)
        dctx = self._split(dout @ self.p["Wo"].T)
        dv = attn.transpose(0, 2, 1) @ dctx
        dattn = dctx @ v.transpose(0, 2, 1)
        dscores = softmax_backward(attn, dattn) / math.sqrt(self.dh)
        dq = dscores @ k
        dk = dscores.transpose(0, 2, 1) @ q
        dqm, dkm, dvm = self._merge(dq), self._merge(dk), self._merge(dv)
        self.g["Wq"] += x.T @ dqm
        self.g["Wk"] += x.T @ dkm
        self.g["Wv"] += x.T @ dvm
        self.g["bq"] += dqm.sum(axis=0)
        self.g["bk"] += dkm.sum(axis=0)
        self.g["bv"] += dvm.sum(axis=0)
        return dqm @ self.p["Wq"].T + dkm @ self.p["Wk"].T + dvm @ self.p["Wv"].T


class FeedForward(Module):
    """Position-wise two-layer ReLU network."""

    def __init__(self, d: int, hidden: int, rng: np.random.Generator):
        super().__init__()
        self.fc1 = Dense(d, hidden, rng)
        self.fc2 = Dense(hidden, d, rng)
        for name, arr in self.fc1.p.items():
            self.p[f"fc1.{name}"] = arr
            self.g[f"fc1.{name}"] = self.fc1.g[name]
        for name, arr in self.fc2.p.items():
            self.p[f"fc2.{name}"] = arr
            self.g[f"fc2.{name}"] = self.fc2.g[name]

    def forward(self, x: np.ndarray):
        pre, c1 = self.fc1.forward(x)
        h = relu(pre)
        out, c2 = self.fc2.forward(h)
        return out, (c1, pre, c2)

    def backward(self, dout: np.ndarray, cache) -> np.ndarray:
        c1, pre, c2 = cache
        dh = self.fc2.backward(dout, c2)
        dpre = dh * (pre > 0.0)
        return self.fc1.backward(dpre, c1)


class TransformerLayer(Module):
    """Pre-norm transformer block: x + MHSA(LN(x)), then h + FFN(LN(h))."""

    def __init__(self, d: int, n_heads: int, ffn_hidden: int, rng: np.random.Generator):
        super().__init__()
        self.ln1 = LayerNorm(d)
        self.attn = MultiHeadSelfAttention(d, n_heads, rng)
        self.ln2 = LayerNorm(d)
        self.ffn = FeedForward(d, ffn_hidden, rng)
        for prefix, mod in (("ln1", self.ln1), ("attn", self.attn), ("ln2", self.ln2), ("ffn", self.ffn)):
            for name, arr in mod.p.items():
                self.p[f"{prefix}.{name}"] = arr
                self.g[f"{prefix}.{name}"] = mod.g[name]

    def forward(self, x: np.ndarray):
        n1, c1 = self.ln1.forward(x)
        a, ca = self.attn.forward(n1)
        h = x + a
        n2, c2 = self.ln2.forward(h)
        f, cf = self.ffn.forward(n2)
        return h + f, (c1, ca, c2, cf)

    def backward(self, dout: np.ndarray, cache) -> np.ndarray:
        c1, ca, c2, cf = cache
        dn2 = self.ffn.backward(dout, cf)
        dh = dout + self.ln2.backward(dn2, c2)
        dn1 = self.attn.backward(dh, ca)
        return dh + self.ln1.backward(dn1, c1)


class VariableAttentionPool(Module):
    """Attention over a variable-length token set within one visit.

    Scores a_j = q . tanh(W e_j) are softmax-normalized and the pooled
    vector is the weighted sum of the original embeddings.
    """

    def __init__(self, d: int, rng: np.random.Generator):
        super().__init__()
        self._add_param("W", rng.normal(0.0, 1.0 / math.sqrt(d), (d, d)))
        self._add_param("q", rng.normal(0.0, 1.0, d))

    def forward(self, e: np.ndarray):
        z = np.tanh(e @ self.p["W"].T)
        a = z @ self.p["q"]
        alpha = softmax(a)
        v = alpha @ e
        return v, (e, z, alpha)

    def backward(self, dv: np.ndarray, cache) -> np.ndarray:
        e, z, alpha = cache
        dalpha = e @ dv
        de = np.outer(alpha, dv)
        da = softmax_backward(alpha, dalpha)
        self.g["q"] += z.T @ da
        dz = np.outer(da, self.p["q"])
        dpre = dz * (1.0 - z * z)
        self.g["W"] += dpre.T @ e
        de += dpre @ self.p["W"]
        return de
