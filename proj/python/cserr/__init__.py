"""Error distributions on emitter-generated photonic cluster states.

Thin python surface over the C++ core: operator algebra, Hamiltonian
construction, the exact error-pattern engine with its brute-force oracle,
Markovian-form bounds, and the model-fitting helpers.
"""

from ._core import (  # noqa: F401
    BathSpec,
    ConfigError,
    EnvState,
    HamiltonianSet,
    InvariantError,
    ResourceError,
    bound_eq5,
    brute_force_oracle,
    build_dephasing_pair,
    build_full_hamiltonian,
    compute_bounds,
    conditional_polarization,
    delta_op,
    distribution,
    error_operator,
    evolve_unitary,
    fit_markov,
    fit_trajectory,
    gaussian_profiles,
    h_count,
    hermitian_eig,
    m_operators,
    markov_model_probs,
    markov_prob,
    overhauser_stats,
    pattern_to_string,
    pd_error_operator,
    pd_step_unitary,
    psd_norm,
    reproduce_config_json,
    run_config_json,
    scaling_fit,
    sector_ranks,
    site_operator,
    step_unitary,
    string_to_pattern,
    trajectory_distribution,
    u_pm_pair,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
