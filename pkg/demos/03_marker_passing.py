"""Marker passing: spreading, cutoff, collision, and the emitted path.

Two observations arrive: a supermarket and a going.  Marks spread from
both, carrying an incrementally maintained score; where they meet, the two
trails are glued into a whole path and scored by the cleave rule.  The
half threshold T is what keeps the spread from covering the whole graph;
set it too high and nothing survives.
"""

from planmark import (
    EngineConfig,
    MarkerEngine,
    Observation,
    enumerate_paths_oracle,
    load_kb,
    score_path,
)

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

seen_store = Observation("supermarket2", "supermarket", belief=0.9)
seen_go = Observation("go1", "go", belief=0.9)

engine = MarkerEngine(kb, EngineConfig(half_threshold=0.1, full_threshold=1.0,
                                       max_depth=10))
engine.seed(seen_store)
engine.seed(seen_go)
paths = engine.spread()

print(f"marks retained: {len(engine.marks)}")
for key, mark in engine.marks.items():
    origin, at, _ = key
    print(f"  from {origin:13s} at {at:22s} score={mark.score.value:.4g} "
          f"depth={mark.depth}")

print()
print(f"paths emitted: {len(paths)}")
for path in paths:
    print(" ", path.render())
    print("  score:", score_path(kb, path))

# The exhaustive oracle agrees that this is the only valid connection.
oracle = enumerate_paths_oracle(kb, seen_store, seen_go, max_depth=6)
assert [p.render() for p in oracle] == [p.render() for p in paths]
print()
print("oracle agrees: the emitted path is the only valid one to depth 6")

# Raise T past what any half-path can sustain and the spread dies out.
strict = MarkerEngine(kb, EngineConfig(half_threshold=5.0, max_depth=10))
strict.seed(seen_store)
strict.seed(seen_go)
print("with T=5.0:", len(strict.spread()), "paths,",
      len(strict.marks), "marks (just the seeds)")
