"""Plan recognition by marker passing over a schema network.

Observed instances spread marks through a base of schemas connected by isa
and role links.  Colliding marks yield candidate explanatory paths, pruned
on the fly by an incrementally computed probabilistic upper bound (the
spinal contribution) and validated afterwards by exact evaluation of the
small Bayesian network each path induces.
"""

from .bayes import (
    Cpts,
    EvidenceRegistry,
    NetworkError,
    VertebrateNetwork,
    approve,
    build_network,
    default_cpts,
    evidence_filter,
    exact_posterior,
    posterior_by_elimination,
    render_network,
)
from .kb import KbError, KnowledgeBase, Observation, Schema, load_kb, render_kb
from .marker import (
    CompletenessReport,
    EngineConfig,
    Mark,
    MarkerEngine,
    OracleGuardError,
    completeness_check,
    declarative_valid,
    enumerate_paths_oracle,
)
from .paths import (
    LinkKind,
    Path,
    PathError,
    START_STATE,
    TraversalLink,
    ValidityState,
    parse_path,
    render_path,
    reverse,
    step,
    validate,
)
from .pipeline import (
    RunConfig,
    RunReport,
    SynthCorpus,
    SynthParams,
    random_kb,
    run,
    synth_corpus,
)
from .scoring import (
    HalfScore,
    combine,
    extend_half,
    half_from,
    initial_score,
    link_multiplier,
    score_path,
    terminal_multiplier,
)
from .semantics import (
    Inst,
    SlotEq,
    StatementSet,
    relevant_instance_trace,
    relevant_statements,
    relevant_type,
    statements_of,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
