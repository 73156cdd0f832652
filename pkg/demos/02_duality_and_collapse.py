"""Frames, their complex algebras, and the finite collapse of MH onto CKL.

Every frame on two worlds with two agents is classified four ways: as a
frame, by the three induction schemas, as a CKL-algebra, and as an
MH-algebra. On finite structures all four verdicts coincide.
"""

from collections import Counter

from ckl import AgentSet, complex_algebra, is_ckl_algebra, is_ckl_frame, is_mh_algebra, parse, valid_in_frame
from ckl.kripke import closure_diff, enumerate_frames

agents = AgentSet([1, 2])
schemas = [parse(s, agents) for s in ("C p -> p", "C p -> E C p", "C (p -> E p) -> (p -> C p)")]

tally = Counter()
example = None
for frame in enumerate_frames(2, agents):
    alg = complex_algebra(frame)
    verdicts = (is_ckl_frame(frame), all(valid_in_frame(frame, s) for s in schemas),
                bool(is_ckl_algebra(alg)), bool(is_mh_algebra(alg)))
    tally[verdicts] += 1
    if example is None and not verdicts[0]:
        example = frame, is_mh_algebra(alg)

for verdicts, count in sorted(tally.items()):
    print(f"frame/schemas/CKL/MH = {verdicts}: {count} frames")

frame, check = example
print("\na non-CKL frame:", frame)
print("closure difference:", closure_diff(frame))
print(f"first MH axiom to fail: {check.axiom} at element {check.witness:#b}")
