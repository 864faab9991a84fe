"""
Burnside presentations
======================

Generated presentations for cyclic groups and the stored ones for
C2 x C2 and D6.
"""

from eqbirat.burnside import burn2_cyclic_relations, class_verdict, preset_presentation, projection_functional

# C4: ten generators, and [1,3] dies
p = burn2_cyclic_relations(4)
print(len(p.generators), "generators,", len(p.relations), "relations")
for row in p.relations:
    print(p.format(row))
print("[1,3] = 0:", p.is_zero(p.vector([(1, "(C4,k,(1,3))")])))

# quotient structure for small N
for N in range(2, 13):
    print(N, burn2_cyclic_relations(N).quotient.smith)

# six C2 x C2 actions
q = preset_presentation("burn2-C2xC2")
for name, c in q.classes.items():
    print(name, class_verdict(q, c))

# the D6 projection separates the two Iskovskikh surfaces
d = preset_presentation("burn2-D6")
f = projection_functional(d, "center", noncyclic_only=True, target_Y_label="P1")
for name in ("X", "Y"):
    print(name, f(d.classes[name]))
