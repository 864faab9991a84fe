"""
Comultiplication on the C48 cubic fourfold
==========================================

The class of the C48 action is hard to test directly, so we push it
along C48 -> C3 and test the image in a tensor product over F2.
"""

import time

from eqbirat.classes import as_action, beta, preset
from eqbirat.groups import dual_sequence
from eqbirat.linalg import in_row_space
from eqbirat.maps import comultiply, tensor_is_zero
from eqbirat.symbols import relations

t0 = time.perf_counter()
B, v = beta(as_action(preset("cubic4-C48")))
print(len(v), "fixed points,", B.size, "symbols")

s = dual_sequence(B.group, [16])
T = comultiply(s, B, v, 1)
for left, right in T.left_factors().items():
    print(T.left.format(left), "(x)", T.right.format_vector(right))

# two of the four terms cancel mod 2 already in B_3(C16)
R = T.right
a = R.vector([[(12,), (13,), (10,)], [(9,), (6,), (12,)]])
print("[-4,-3,-6] + [9,6,12] zero mod 2:", in_row_space(relations(R), a, field=2))

print("image zero:", tensor_is_zero(T, 2, minus=True), "in %.1f s" % (time.perf_counter() - t0))
