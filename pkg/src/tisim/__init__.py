"""Offer/confirmation-wave simulator for interaction-free-measurement optics.

Offer waves propagate forward through an optical network; confirmation waves
propagate backward from detectors and absorbers; candidate transactions are
enumerated, weighed by the Born rule (and independently by the backward
echo), resolved flat or hierarchically, and post-selected.
"""

from .amplitudes import (
    Bra,
    Ket,
    SubsystemSpec,
    add,
    approx_equal,
    dual,
    inner,
    norm_sq,
    project,
    rebase,
    scale,
    tensor,
    unit,
)
from .engine import (
    AtomBasis,
    ChshSettings,
    MeasurementContext,
    Outcome,
    OutcomeDistribution,
    TransactionCandidate,
    chsh,
    chsh_monte_carlo,
    chsh_optimal_settings,
    contextuality_verdicts,
    echo_weight,
    enumerate_transactions,
    hierarchical_distribution,
    no_assignment_reproduces_both,
    post_select,
    resolve_flat,
    resolve_hierarchical,
    sample_flat,
    sample_hierarchical,
    y_context,
    z_context,
)
from .network import (
    AtomBox,
    BeamSplitter,
    Detector,
    Emitter,
    Mirror,
    Network,
    PropagationTrace,
    backward_propagate,
    forward_propagate,
    load_network,
    network_from_dict,
    network_to_dict,
    save_network,
    two_laser_variant,
    validate,
)
from .pathnotation import (
    PathExpression,
    PathKet,
    PathSegment,
    amplitude,
    enumerate_paths,
    format_expression,
    parse,
    sum_amplitudes,
    surviving_detector_paths,
)
from .scenarios import (
    RunReport,
    Scenario,
    build_scenario,
    ev_bomb_network,
    hardy_network,
    qle_network,
    run_exact,
    run_mc,
    scenario_names,
    verification_checks,
)

__version__ = "0.1.0"
