import pytest

from planmark import (
    HalfScore,
    Observation,
    combine,
    extend_half,
    half_from,
    initial_score,
    link_multiplier,
    parse_path,
    reverse,
    score_path,
    terminal_multiplier,
)
from planmark.paths import TraversalLink

from conftest import sample_paths


@pytest.mark.parametrize("belief", [0.9, 1.0, 0.42])
def test_initial_score_is_the_belief(belief):
    assert initial_score(Observation("x", "go", belief)) == belief


def test_link_multipliers(kb):
    role_up = TraversalLink.role_up("supermarket-shopping", "store-of", "supermarket")
    assert link_multiplier(kb, role_up) == pytest.approx(2.0, rel=1e-12)
    assert link_multiplier(kb, role_up.flip()) == 1.0
    isa_up = TraversalLink.isa_up("supermarket-shopping", "shopping")
    assert link_multiplier(kb, isa_up) == 1.0
    assert link_multiplier(kb, isa_up.flip()) == pytest.approx(0.4, rel=1e-12)


def test_terminal_multiplier(kb):
    assert terminal_multiplier(kb, Observation("go1", "go", 0.9)) == pytest.approx(9.0, rel=1e-12)
    assert terminal_multiplier(kb, Observation("s", "shopping", 0.05)) == pytest.approx(1.0, rel=1e-12)
    assert terminal_multiplier(kb, Observation("m", "supermarket", 1.0)) == pytest.approx(100.0, rel=1e-12)


def test_fig31_scores_sixteen_point_two(kb, fig31):
    assert score_path(kb, fig31) == pytest.approx(16.2, rel=1e-12)


def right_to_left_score(kb, path):
    value = terminal_multiplier(kb, path.end)
    for link in reversed(path.links):
        value *= link_multiplier(kb, link)
    return value * initial_score(path.start)


def test_accumulation_directions_agree(kb, fig31):
    assert right_to_left_score(kb, fig31) == pytest.approx(score_path(kb, fig31), rel=1e-12)


def test_single_role_score_reduces_to_belief_product_over_prior(kb):
    # The base path's score collapses to b1*b2/p(start type).
    path = parse_path(kb, "(inst s1 supermarket)"
                          "(role supermarket-shopping store-of supermarket)"
                          "(inst p1 supermarket-shopping)",
                      beliefs=(0.8, 0.7))
    assert score_path(kb, path) == pytest.approx(0.8 * 0.7 / 0.01, rel=1e-12)


def test_score_is_direction_symmetric_on_sampled_paths():
    for base, path in sample_paths(seed=41, limit=120, beliefs=True):
        assert score_path(base, reverse(path)) == pytest.approx(
            score_path(base, path), rel=1e-12)


def test_extend_half_worked_example(kb):
    half = HalfScore(0.9, "supermarket")
    up = extend_half(kb, half, TraversalLink.role_up(
        "supermarket-shopping", "store-of", "supermarket"))
    assert up == HalfScore(pytest.approx(1.8, rel=1e-12), "supermarket-shopping")
    same = extend_half(kb, up, TraversalLink.isa_up("supermarket-shopping", "shopping"))
    assert same.value == up.value
    assert same.at == "shopping"


def test_extend_half_requires_chaining(kb):
    with pytest.raises(ValueError, match="departs from"):
        extend_half(kb, HalfScore(1.0, "go"),
                    TraversalLink.isa_up("supermarket", "store-"))


def test_half_fold_equals_closed_form(kb, fig31):
    half = half_from(fig31.start)
    for link in fig31.links:
        half = extend_half(kb, half, link)
    product = initial_score(fig31.start)
    for link in fig31.links:
        product *= link_multiplier(kb, link)
    assert half.value == pytest.approx(product, rel=1e-12)
    assert half.at == fig31.end.schema


def test_combine_worked_example(kb, fig31):
    # Cleave at shopping: H1 = 0.9 * 2.0 * 1.0 = 1.8, H2 = 0.9 * 0.5 = 0.45.
    h1 = half_from(fig31.start)
    for link in fig31.links[:2]:
        h1 = extend_half(kb, h1, link)
    h2 = half_from(fig31.end)
    h2 = extend_half(kb, h2, fig31.links[2].flip())
    assert h1.value == pytest.approx(1.8, rel=1e-12)
    assert h2.value == pytest.approx(0.45, rel=1e-12)
    assert combine(kb, h1, h2) == pytest.approx(16.2, rel=1e-12)


def test_combine_requires_matching_schema(kb):
    with pytest.raises(ValueError, match="different schemas"):
        combine(kb, HalfScore(1.0, "go"), HalfScore(1.0, "shopping"))


def cleave_at(base, path, j):
    h1 = half_from(path.start)
    for link in path.links[:j]:
        h1 = extend_half(base, h1, link)
    h2 = half_from(path.end)
    for link in reversed(path.links[j:]):
        h2 = extend_half(base, h2, link.flip())
    return h1, h2


def test_degenerate_cleaves_at_endpoints(kb, fig31):
    want = score_path(kb, fig31)
    for j in (0, len(fig31.links)):
        h1, h2 = cleave_at(kb, fig31, j)
        assert combine(kb, h1, h2) == pytest.approx(want, rel=1e-12)


def test_cleave_identity_everywhere_on_sampled_paths():
    count = 0
    for base, path in sample_paths(seed=43, limit=120, beliefs=True):
        want = score_path(base, path)
        for j in range(len(path.links) + 1):
            h1, h2 = cleave_at(base, path, j)
            assert combine(base, h1, h2) == pytest.approx(want, rel=1e-12)
        count += 1
    assert count >= 100


def test_monotone_sanity_bound():
    # A half's value never exceeds any of its prefixes by more than the
    # largest multiplier per added link.
    for base, path in sample_paths(seed=47, limit=40):
        multipliers = [link_multiplier(base, link)
                       for name in base.schemas
                       for link in base.neighbors(name)]
        biggest = max(multipliers)
        values = [half_from(path.start).value]
        half = half_from(path.start)
        for link in path.links:
            half = extend_half(base, half, link)
            values.append(half.value)
        for i, early in enumerate(values):
            for j in range(i, len(values)):
                assert values[j] <= early * max(biggest, 1.0) ** (j - i) + 1e-9
