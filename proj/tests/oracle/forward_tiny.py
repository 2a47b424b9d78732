"""Reference forward pass for the one-layer, one-head encoder in model_test.cpp.

Weights follow the same closed-form fill as the test: entry k of manifest
tensor t is ((t * 31 + k * 17) % 11 - 5) / 10. Writes hidden states and MLM
logits, one row per line, to tests/golden/forward_tiny.txt.
"""
import math
import pathlib

import numpy as np

V, L, D, FF = 8, 5, 3, 4
manifest = [
    ("embeddings.token", (V, D)), ("embeddings.position", (L, D)),
    ("q.w", (D, D)), ("q.b", (D,)), ("k.w", (D, D)), ("k.b", (D,)),
    ("v.w", (D, D)), ("v.b", (D,)), ("o.w", (D, D)), ("o.b", (D,)),
    ("n1.g", (D,)), ("n1.b", (D,)),
    ("f1.w", (D, FF)), ("f1.b", (FF,)), ("f2.w", (FF, D)), ("f2.b", (D,)),
    ("n2.g", (D,)), ("n2.b", (D,)),
    ("m.w", (D, D)), ("m.b", (D,)), ("mn.g", (D,)), ("mn.b", (D,)),
    ("out.w", (D, V)), ("out.b", (V,)),
]
P = {}
for t, (name, shape) in enumerate(manifest):
    n = int(np.prod(shape))
    vals = [((t * 31 + k * 17) % 11 - 5) / 10.0 for k in range(n)]
    P[name] = np.array(vals, dtype=np.float64).reshape(shape)

ids = [2, 5, 7, 3, 0]
att = [1, 1, 1, 1, 0]


def ln(x, g, b, eps=1e-12):
    mu = x.mean(axis=1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=1, keepdims=True)
    return (x - mu) / np.sqrt(var + eps) * g + b


def gelu(x):
    return np.vectorize(lambda z: 0.5 * z * (1.0 + math.erf(z / math.sqrt(2.0))))(x)


x = P["embeddings.token"][ids] + P["embeddings.position"][np.arange(L)]
q = x @ P["q.w"] + P["q.b"]
k = x @ P["k.w"] + P["k.b"]
v = x @ P["v.w"] + P["v.b"]
s = q @ k.T / math.sqrt(D)
w = np.zeros_like(s)
for i in range(L):
    keep = [j for j in range(L) if att[j]]
    e = np.exp(s[i, keep] - s[i, keep].max())
    w[i, keep] = e / e.sum()
a = (w @ v) @ P["o.w"] + P["o.b"]
x = ln(x + a, P["n1.g"], P["n1.b"])
h = gelu(x @ P["f1.w"] + P["f1.b"]) @ P["f2.w"] + P["f2.b"]
x = ln(x + h, P["n2.g"], P["n2.b"])
m = ln(gelu(x @ P["m.w"] + P["m.b"]), P["mn.g"], P["mn.b"])
logits = m @ P["out.w"] + P["out.b"]

out = pathlib.Path(__file__).resolve().parent.parent / "golden" / "forward_tiny.txt"
with open(out, "w") as f:
    f.write("# hidden 5x3\n")
    for row in x:
        f.write(" ".join(repr(float(z)) for z in row) + "\n")
    f.write("# mlm_logits 5x8\n")
    for row in logits:
        f.write(" ".join(repr(float(z)) for z in row) + "\n")
