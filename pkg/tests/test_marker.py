import pytest

from planmark import (
    EngineConfig,
    KbError,
    MarkerEngine,
    Observation,
    completeness_check,
    enumerate_paths_oracle,
    load_kb,
    random_kb,
    score_path,
)
from planmark.marker import OracleGuardError

from conftest import assert_matches_oracle_modulo_retention, chain_kb_text


def small_config(**kwargs):
    defaults = dict(half_threshold=0.0, full_threshold=0.0, max_depth=4)
    defaults.update(kwargs)
    return EngineConfig(**defaults)


def fixture_seeds():
    return (Observation("supermarket2", "supermarket", 0.9),
            Observation("go1", "go", 0.9))


def test_fixture_emits_exactly_fig31(kb, fig31):
    engine = MarkerEngine(kb, EngineConfig(half_threshold=0.1,
                                           full_threshold=1.0, max_depth=10))
    for obs in fixture_seeds():
        engine.seed(obs)
    paths = engine.spread()
    assert [p.render() for p in paths] == [fig31.render()]
    assert score_path(kb, paths[0]) == pytest.approx(16.2, rel=1e-12)


def test_oracle_on_fixture(kb, fig31):
    o1, o2 = fixture_seeds()
    assert [p.render() for p in enumerate_paths_oracle(kb, o1, o2, 6)] == [fig31.render()]
    assert enumerate_paths_oracle(kb, o1, o2, 1) == []


def test_threshold_above_everything_emits_nothing(kb):
    engine = MarkerEngine(kb, EngineConfig(half_threshold=50.0, max_depth=10))
    for obs in fixture_seeds():
        engine.seed(obs)
    assert engine.spread() == []


def test_full_threshold_blocks_emission(kb):
    engine = MarkerEngine(kb, EngineConfig(half_threshold=0.1,
                                           full_threshold=100.0, max_depth=10))
    for obs in fixture_seeds():
        engine.seed(obs)
    assert engine.spread() == []


def test_seeding_twice_is_idempotent(kb):
    engine = MarkerEngine(kb, small_config())
    obs = fixture_seeds()[0]
    engine.seed(obs)
    engine.seed(obs)
    assert len(engine.marks) == 1
    with pytest.raises(ValueError, match="already observed"):
        engine.seed(Observation("supermarket2", "supermarket", 0.5))


def test_seed_validation(kb):
    engine = MarkerEngine(kb, small_config())
    with pytest.raises(KbError):
        engine.seed(Observation("x", "ghost"))
    with pytest.raises(ValueError, match="belief"):
        engine.seed(Observation("x", "go", 0.0))


def test_unconnected_observations_emit_nothing():
    base = load_kb("(eq-prior 0.01)(schema a :prior 0.5)(schema b :prior 0.5)")
    engine = MarkerEngine(base, small_config())
    engine.seed(Observation("x", "a"))
    engine.seed(Observation("y", "b"))
    assert engine.spread() == []


def test_incremental_seeding_collides_at_seed_time(kb):
    engine = MarkerEngine(kb, small_config(max_depth=6))
    o1, o2 = fixture_seeds()
    engine.seed(o1)
    assert engine.spread() == []
    engine.seed(o2)  # the first origin's mark already sits on go
    emitted = engine.spread()
    assert len(emitted) == 1
    assert emitted[0].start == o1 and emitted[0].end == o2


def test_no_mark_below_threshold_is_placed(kb):
    engine = MarkerEngine(kb, EngineConfig(half_threshold=0.3, max_depth=10))
    for obs in fixture_seeds():
        engine.seed(obs)
    engine.spread()
    for mark in engine.marks.values():
        if mark.depth > 0:
            assert mark.score.value >= 0.3


def test_determinism_of_emission_order():
    base = random_kb(5, n_schemas=14, n_roles=16)
    names = sorted(base.schemas)
    seeds = (Observation("a", names[0]), Observation("b", names[3]))

    def run_once():
        engine = MarkerEngine(base, small_config())
        for obs in seeds:
            engine.seed(obs)
        return [p.render() for p in engine.spread()]

    assert run_once() == run_once()


def _engine_run(base, seeds, config):
    engine = MarkerEngine(base, config)
    for obs in seeds:
        engine.seed(obs)
    engine.spread()
    return engine


@pytest.mark.parametrize("seed", range(6))
def test_spread_matches_oracle_on_random_bases(seed):
    base = random_kb(seed, n_schemas=12, n_roles=12)
    names = sorted(base.schemas)
    seeds = (Observation("a", names[2 * seed % len(names)]),
             Observation("b", names[(3 * seed + 5) % len(names)]))
    if seeds[0].schema == seeds[1].schema:
        seeds = (seeds[0], Observation("b", names[(3 * seed + 6) % len(names)]))
    assert_matches_oracle_modulo_retention(base, seeds, max_depth=3)


def test_oracle_guard_trips():
    base = load_kb(chain_kb_text(6))
    with pytest.raises(OracleGuardError):
        enumerate_paths_oracle(base, Observation("x", "c0"),
                               Observation("y", "c6"), 6, prefix_guard=3)


def test_oracle_rejects_identical_instances(kb):
    with pytest.raises(ValueError, match="distinct"):
        enumerate_paths_oracle(kb, Observation("x", "go"), Observation("x", "go"), 3)


def test_completeness_check_fixture_empty(kb):
    report = completeness_check(
        kb, EngineConfig(half_threshold=0.1, full_threshold=0.01, max_depth=6),
        fixture_seeds())
    assert report.empty


def test_completeness_check_empty_at_zero_threshold():
    for seed in range(4):
        base = random_kb(seed, n_schemas=10, n_roles=10)
        names = sorted(base.schemas)
        seeds = (Observation("a", names[0]), Observation("b", names[-1]))
        report = completeness_check(base, small_config(max_depth=3), seeds)
        assert report.empty


ADVERSARIAL_KB = """
(eq-prior 0.0001)
(schema x :prior 0.5)
(schema y :prior 0.5)
(schema a :prior 0.005)
(schema b :prior 0.005)
(schema big :prior 0.5)
(role a hold-of x)   ; RoleUp from x multiplies by 0.01
(role big into-a a)  ; RoleUp from a multiplies by 100
(role big into-b b)
(role b hold-of y)
"""


def test_completeness_check_lists_a_dipping_path():
    # The only connecting path dips below T on both halves midway, yet its
    # full score clears T^2: the paper-level guarantee's boundary.
    base = load_kb(ADVERSARIAL_KB)
    seeds = (Observation("x1", "x", 1.0), Observation("y1", "y", 1.0))
    config = EngineConfig(half_threshold=0.02, full_threshold=0.0004, max_depth=6)
    engine = _engine_run(base, seeds, config)
    assert engine.emitted == []
    report = completeness_check(base, config, seeds)
    assert len(report.entries) == 1
    entry = report.entries[0]
    assert entry.reason == "half-dip"
    assert entry.sc == pytest.approx(2.0, rel=1e-9)


def test_emitted_scores_match_recomputation_and_threshold():
    for seed in range(4):
        base = random_kb(seed + 50, n_schemas=12, n_roles=14)
        names = sorted(base.schemas)
        seeds = (Observation("a", names[1], 0.7), Observation("b", names[-2], 0.8))
        config = small_config(max_depth=3, full_threshold=1e-6)
        engine = _engine_run(base, seeds, config)
        for path in engine.emitted:
            assert score_path(base, path) >= config.full_threshold
