"""
Classes of explicit actions
===========================

Compute the class of a few stored actions and decide whether it vanishes.
"""

from eqbirat.classes import as_action, beta, beta_k, hypersurface_fixed_weights, preset
from eqbirat.linalg import Cokernel, in_row_space
from eqbirat.symbols import relations

# a cubic surface with a C3 action: its class is [0,2] and does not vanish
B, v = beta(preset("cubic-surface-C3"))
print(B.format_vector(v), "zero over Q:", in_row_space(relations(B), v))

# diagonal action on P^2 gives 3[1,2], which is zero
B, v = beta(preset("p2-C3-diag"))
print(B.format_vector(v), "zero over Q:", in_row_space(relations(B), v))

# del Pezzo surfaces of degree 1
for name in ("dp1-C24", "dp1-C30"):
    B, v = beta(preset(name))
    print(name, B.format_vector(v), "zero:", in_row_space(relations(B), v))

# fixed points on a cubic fourfold; e_0 is not on it
h = preset("cubic4-C36")
for i in range(1, 6):
    print("e%d" % i, hypersurface_fixed_weights(h, i))

# the refined class keeps track of the fixed curve.  [7,2,4] is 2-torsion,
# so it vanishes over Q but not integrally
for label, (Bk, vk) in beta_k(as_action(preset("cubic4-C8"))).items():
    C = Cokernel(relations(Bk))
    print(label, Bk.format_vector(vk), "order", C.order(vk))
