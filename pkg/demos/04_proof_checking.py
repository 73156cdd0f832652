"""Checking Hilbert-style derivations.

A shipped derivation of C p -> K1 p is checked, then broken in one place;
the checker points at the offending line.
"""

from ckl import AgentSet, check_script, is_tautology, parse, to_text
from ckl.proof import fixture_names, fixture_text

agents = AgentSet([1, 2])

for name in fixture_names():
    result = check_script(fixture_text(name), agents)
    print(f"{name:24s} accepted, proves {to_text(result.conclusion)}")

text = fixture_text("cp_implies_k1p.prf")
print("\n" + text)
broken = text.replace("mp 7 9", "mp 6 9")
print("with the last step citing line 6:", check_script(broken, agents))

for f in ("K1 p | ~K1 p", "E p -> K1 p", "C p -> p"):
    print(f"is {f!r} a tautology? {is_tautology(parse(f, agents), agents)}")
