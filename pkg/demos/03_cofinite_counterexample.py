"""An MH-algebra that is not a CKL-algebra.

Elements are finite or cofinite subsets of the naturals. The powers E^n a of
a = C{0} shrink towards the odd numbers, which is not an element, and every
candidate lower bound can be beaten, so C a = 0 is not their infimum.
"""

from ckl.cofinite import A, SAlgebra, fin, figure_rows, format_table, no_glb_witness, run_suite

alg = SAlgebra(2)
print("a and its boxes at even positions 0..10:")
print(format_table(list(range(0, 12, 2)), figure_rows(alg, A, 6)))

print()
for n in range(6):
    print(f"E^{n} a = {alg.e_power(A, n)}")
print("C a =", alg.box_c(A))

print()
for candidate in (fin(1, 3), fin(0), A, fin()):
    print(f"{candidate} as a glb of the E^n a:", no_glb_witness(alg, candidate))

print()
for r in run_suite(8, samples=2000):
    print(f"{'ok' if r.ok else 'FAIL'}  {r.name} ({r.checked} checked)")
