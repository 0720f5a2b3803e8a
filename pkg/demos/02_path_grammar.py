"""The path validity grammar, link by link.

A path claims that two observed instances are connected through slots and
type refinements.  Two shapes of claim are banned outright: generalizing
then immediately re-specializing (disjoint siblings cannot support each
other), and descending into a filler then climbing into another owner
(nothing observes the shared filler).  Watching the DFA step through a few
sequences makes the rules concrete.
"""

from planmark import Observation, load_kb, parse_path, reverse, validate
from planmark.paths import LinkKind, Path, START_STATE, TraversalLink, step

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


def show_dfa(title, kinds):
    state = START_STATE
    trace = []
    for kind in kinds:
        state = step(state, kind)
        if state is None:
            trace.append("REJECTED")
            break
        trace.append(f"{state.phase.name}/{'isa-up' if state.last_was_isa_up else '-'}")
    print(f"{title}: {' -> '.join(k.name for k in kinds)}")
    print(f"   {' -> '.join(trace)}")


show_dfa("the example path's shape ", [LinkKind.ROLE_UP, LinkKind.ISA_UP, LinkKind.ROLE_DOWN])
show_dfa("isa plateau              ", [LinkKind.ISA_UP, LinkKind.ISA_DOWN])
show_dfa("slot-filler valley       ", [LinkKind.ROLE_DOWN, LinkKind.ISA_UP, LinkKind.ROLE_UP])
show_dfa("specialize-then-generalize is fine", [LinkKind.ISA_DOWN, LinkKind.ISA_UP, LinkKind.ROLE_UP])

# The canonical surface form tags each link with its travel direction.
text = ("(inst supermarket2 supermarket)"
        "(role supermarket-shopping store-of supermarket)"
        "(isa supermarket-shopping shopping)"
        "(role- shopping go-step go)"
        "(inst go1 go)")
path = parse_path(kb, text, beliefs=(0.9, 0.9))
print()
print("parsed:", path.render())
print("valid: ", validate(path))

# A path with no role link asserts nothing beyond retyping; invalid.
no_role = Path(start=Observation("supermarket2", "supermarket"),
               links=(TraversalLink.isa_up("supermarket", "store-"),),
               end=Observation("store7", "store-"))
print("isa-only path valid:", validate(no_role))

# Reading the path from the other end flips every link.
print()
print("reversed:", reverse(path).render())
assert reverse(reverse(path)) == path
