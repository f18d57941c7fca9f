"""Tabulate the Hastings-McLeod solution of PII and check it against the
Airy tail and the first integral u' = -q^2."""

from scipy.special import airy

from hardedge import painleve2 as p2

hm = p2.solve_hastings_mcleod(-8.0, 8.0)
for t in (-6.0, -2.0, 0.0, 2.0, 6.0):
    print(f"t={t:5.1f}  q={hm.q_at(t):.12f}  Ai={airy(t)[0]:.12f}")
print("u check:", p2.u_check(hm))
