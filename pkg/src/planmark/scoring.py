"""The spinal contribution: a cheap, incrementally computable upper bound
on the posterior of the network a path induces.

Scoring a whole path is a single left-to-right product: the start
observation's belief, one multiplier per link, and a terminal factor
belief/prior for the end observation.  The per-link multipliers:

    RoleUp    p(filled) / p(filler)
    RoleDown  1.0
    IsaUp     1.0
    IsaDown   p(specific) / p(general)

Half-paths built outward from one observation carry the same product minus
the terminal factor; two halves meeting at a schema n recombine as
``half1 * half2 / p(n)``, which equals the whole-path score exactly.  That
cleave identity is what lets the marker passer prune on a threshold while
spreading, before it knows which paths will meet.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kb import KnowledgeBase, Observation
from .paths import LinkKind, Path, TraversalLink

Score = float


@dataclass(frozen=True)
class HalfScore:
    """Running score of a half-path currently ending at schema ``at``."""

    value: float
    at: str


def initial_score(obs: Observation) -> Score:
    return obs.belief


def link_multiplier(kb: KnowledgeBase, link: TraversalLink) -> float:
    if link.kind is LinkKind.ROLE_UP:
        return kb.prior(link.filled) / kb.prior(link.filler)
    if link.kind is LinkKind.ISA_DOWN:
        return kb.prior(link.specific) / kb.prior(link.general)
    # RoleDown and IsaUp leave the bound unchanged.
    kb.schema(link.source)
    kb.schema(link.destination)
    return 1.0


def terminal_multiplier(kb: KnowledgeBase, obs: Observation) -> float:
    return obs.belief / kb.prior(obs.schema)


def score_path(kb: KnowledgeBase, path: Path) -> Score:
    value = initial_score(path.start)
    for link in path.links:
        value *= link_multiplier(kb, link)
    return value * terminal_multiplier(kb, path.end)


def half_from(obs: Observation) -> HalfScore:
    return HalfScore(value=initial_score(obs), at=obs.schema)


def extend_half(kb: KnowledgeBase, half: HalfScore, link: TraversalLink) -> HalfScore:
    if link.source != half.at:
        raise ValueError(
            f"link departs from {link.source!r} but the half-path is at {half.at!r}")
    return HalfScore(value=half.value * link_multiplier(kb, link),
                     at=link.destination)


def combine(kb: KnowledgeBase, h1: HalfScore, h2: HalfScore) -> Score:
    """Score of the whole path formed by gluing two halves at one schema."""
    if h1.at != h2.at:
        raise ValueError(f"halves end at different schemas: {h1.at!r}, {h2.at!r}")
    return h1.value * h2.value / kb.prior(h1.at)
