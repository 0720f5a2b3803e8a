"""From path score to exact posterior: the factorization at work.

The spinal contribution is a product of belief and prior-ratio terms,
cheap enough to maintain during the spread.  The path's real measure is
the joint posterior of the little Bayesian network it induces, which costs
an enumeration.  The two are tied together exactly: joint = SC * residual,
and the residual stays at or below 1 under mild interior settings, which
is why SC is a safe pruning bound.
"""

from planmark import (
    build_network,
    default_cpts,
    exact_posterior,
    load_kb,
    parse_path,
    posterior_by_elimination,
    relevant_statements,
    render_network,
    score_path,
    statements_of,
)
from planmark.scoring import combine, extend_half, half_from

kb = load_kb("""
(eq-prior 0.001)
(schema store- :prior 0.05)
(schema supermarket :isa store- :prior 0.01)
(schema shopping :prior 0.05)
(schema supermarket-shopping :isa shopping :prior 0.02)
(schema go :prior 0.1)
(role supermarket-shopping store-of supermarket)
(role shopping go-step go)
""")

path = parse_path(kb, "(inst supermarket2 supermarket)"
                      "(role supermarket-shopping store-of supermarket)"
                      "(isa supermarket-shopping shopping)"
                      "(role- shopping go-step go)"
                      "(inst go1 go)", beliefs=(0.9, 0.9))

# Whole-path score: 0.9 * 2.0 * 1.0 * 1.0 * 9.0.
sc = score_path(kb, path)
print("spinal contribution:", sc)

# The same number from two halves glued at the collision schema.
h1 = half_from(path.start)
for link in path.links[:2]:
    h1 = extend_half(kb, h1, link)
h2 = extend_half(kb, half_from(path.end), path.links[2].flip())
print(f"halves at {h1.at!r}: {h1.value} and {h2.value};",
      "combined:", combine(kb, h1, h2))

# What the path asserts, and the subset the network is built from.
print()
print("S(P): ", statements_of(path).render())
rs = relevant_statements(kb, path)
print("RS(P):", rs.render())

network = build_network(kb, path, rs)
print()
print(render_network(network))

cpts = default_cpts(kb, network, gamma1=0.9, gamma0=1e-7)
joint, residual = exact_posterior(network, cpts)
print("joint posterior:", joint)
print("residual:       ", residual)
print("sc * residual:  ", sc * residual)

# An independent evaluator (variable elimination) lands on the same numbers.
joint2, residual2 = posterior_by_elimination(network, cpts)
assert abs(joint - joint2) <= 1e-12 * joint
assert abs(residual - residual2) <= 1e-12 * residual
print()
print("variable elimination agrees to 1e-12")
