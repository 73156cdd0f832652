"""Two muddy children: who knows what, and what is common knowledge.

Worlds are pairs (mud on child 1, mud on child 2). Each child sees the
other's forehead but not their own, so K_i relates worlds that differ only
in coordinate i.
"""

import itertools

import numpy as np

from ckl import Frame, KripkeModel, evaluate, parse

worlds = list(itertools.product((0, 1), repeat=2))
n = len(worlds)
r_k = {}
for i in (1, 2):
    rel = np.zeros((n, n), bool)
    for a, u in enumerate(worlds):
        for b, v in enumerate(worlds):
            rel[a, b] = all(u[j] == v[j] for j in range(2) if j != i - 1)
    r_k[i] = rel

frame = Frame.ckl(n, r_k)
valuation = {
    "m1": {w for w, u in enumerate(worlds) if u[0]},
    "m2": {w for w, u in enumerate(worlds) if u[1]},
    "some": {w for w, u in enumerate(worlds) if any(u)},
}
model = KripkeModel(frame, valuation)

for text in ["some", "E some", "E E some", "C some", "K1 m1 | K1 ~m1", "K1 (m2 | ~m2)", "C (K1 m2 | K1 ~m2)"]:
    holds = sorted(evaluate(model, parse(text)))
    print(f"{text:22s} holds at {[worlds[w] for w in holds]}")

# After the father's announcement only worlds with some mud remain.
keep = [w for w, u in enumerate(worlds) if any(u)]
sub = Frame.ckl(len(keep), {i: r_k[i][np.ix_(keep, keep)] for i in (1, 2)})
after = KripkeModel(sub, {k: {keep.index(w) for w in v if w in keep} for k, v in valuation.items()})
print("after the announcement, C some holds at",
      [worlds[keep[w]] for w in sorted(evaluate(after, parse("C some")))])
