"""
Symbol groups of small cyclic groups
====================================

Enumerate symbols, build the blow-up relations and read off ranks and
Smith forms.  Run with ``python notebooks/01_symbol_groups.py``.
"""

from eqbirat import enumerate_symbols, parse_group, relations
from eqbirat.linalg import Cokernel, rank_mod_p, rank_rational

# the five symbols of C3 in dimension 2
B = enumerate_symbols(parse_group("C3"), 2)
print([B.format(i) for i in range(B.size)])

# one relation per position pair; [1,2] = [1,1] + [2,2] is among them
M = relations(B)
for row in M.row_dicts():
    print(B.format_vector(row))

# dimensions over Q for N = 2..16
for N in range(2, 17):
    B = enumerate_symbols(parse_group(f"C{N}"), 2)
    M = relations(B)
    print(N, B.size, B.size - rank_rational(M))

# integral structure: C2 x C2 only has torsion
B = enumerate_symbols(parse_group("C2xC2"), 2)
print("B2(C2xC2) =", Cokernel(relations(B)).smith)

# the antisymmetric quotient for primes, against (p-5)(p-7)/24
for p in (5, 7, 11, 13, 17, 19):
    B = enumerate_symbols(parse_group(f"C{p}"), 2)
    print(p, B.size - rank_rational(relations(B, minus=True)), (p - 5) * (p - 7) // 24)

# mod 2 can see more than Q
B = enumerate_symbols(parse_group("C16"), 3)
M = relations(B)
print("C16, n=3:", B.size - rank_rational(M), "over Q,", B.size - rank_mod_p(M, 2), "over F2")
