"""Conditional combinatory logic workbench.

Unlabelled systems CLC0, CLC, CLC+ and R live in :mod:`clclab.systems`; the
labelled system with its standardness checks in :mod:`clclab.labelled` and
:mod:`clclab.clcs`; the proof algorithms in :mod:`clclab.simulation`.
"""

from .terms import (
    App,
    C,
    C1,
    C2,
    Const,
    F,
    F1,
    InvalidPosition,
    K,
    K1,
    LConst,
    S,
    Sv,
    T,
    T1,
    Term,
    Tup,
    Var,
    apply_subst,
    match_pattern,
    replace_at,
    subterm_at,
)
from .syntax import TermSyntaxError, format_lterm, format_term, parse_lterm, parse_term
from .systems import (
    DEFAULT_FUEL,
    ConditionUnknown,
    ConversionSequence,
    EqResult,
    Fuel,
    NotARedex,
    ReplayError,
    RewriteError,
    Step,
    SystemId,
    Trace,
    Verdict,
    contract,
    conversion_search_clc0,
    eq,
    joinable,
    normalize,
    redexes,
)
from .labelled import Kind, classify, erasures, is_standard, is_strongly_standard, leftmost_erase, refines
from .clcs import (
    AShape,
    LStep,
    LTrace,
    a_expand,
    a_redex_check,
    i_contract,
    i_redexes,
    leadsto_F1,
    s_contract,
    s_normal_forms,
    s_redexes,
    s_reducts_all,
)
from .simulation import (
    PostponementError,
    SimulationError,
    check_un_property,
    detuple_reduction,
    extract_reduction_to_F,
    join_in_clc,
    postpone_i,
    simulate_contraction,
    simulate_expansion,
)
from .harness import (
    GenConfig,
    SuiteReport,
    enumerate_lterms,
    enumerate_terms,
    gen_convertible_to_F,
    gen_lterm,
    gen_term,
    run_suite,
)

__version__ = "0.1.0"


def clear_caches():
    """Drop every memo table (equality, scans, reduct graphs)."""
    from . import clcs, labelled, systems

    systems.clear_caches()
    labelled.clear_caches()
    clcs.clear_caches()
