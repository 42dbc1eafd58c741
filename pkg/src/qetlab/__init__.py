"""qetlab: a numerical laboratory for feedback-displaced field energy.

A massless scalar field is kicked by a smeared sender coupling, and a
distant receiver applies a feedback displacement conditioned on the sender
qubit.  The package computes the resulting renormalized energy density in
closed form (1+1D) and by regulated mode integrals (3+1D), optimizes the
receiver to deepen the induced negative-energy well, and cross-validates
everything against an independent lattice oracle.
"""

from .errors import (
    CausalityError,
    ConfigError,
    DimensionError,
    ExtrapolationError,
    GeometryMismatchError,
    InvalidGeometryError,
    NoFeasiblePointError,
    NonconvergenceError,
    NoNegativeRegionError,
    NormalizationError,
    QetlabError,
    ResolutionError,
    SupportTruncationWarning,
)
from .smearing import (
    CompositeSmearing,
    FAMILIES,
    SmearingSpec,
    compose,
    fourier1d,
    peak_value,
    radial_ft,
    smearing_deriv,
    smearing_eval,
    support_interval,
)
from .field1d import (
    DensityComponents,
    DensityProfile,
    ProtocolConfig,
    WellMetrics,
    alice_density,
    alpha_norm_1d,
    check_causality,
    density1d,
    profile1d,
    pv_of_deriv,
    total_energy,
    well_metrics,
)
from .pvquad import PVProblem, choose_inner_radius, pv_integral
from .protocol import (
    DetectorState,
    MomentIntegrals,
    MomentPair,
    compose_bobs,
    i_integrals_1d,
    locc_branch_density,
    loqc_density,
    sigma_y_expectation,
)
from .lattice import (
    ConvergenceReport,
    LatticeSpec,
    auto_lattice,
    boundary_echo,
    convergence_report,
    oracle_density,
    oracle_total_energy,
)
from .fieldnd import (
    IntegralSet,
    alpha_norm_nd,
    eps_sequence,
    i_integrals,
    radial_profile_nd,
    richardson_limit,
    stress_energy_nd,
    total_energy_nd,
)
from .scaling import (
    QuantumInterestFit,
    ScalingCheck,
    ScalingTransform,
    alpha_norm_scaling_exponent,
    quantum_interest_exponents,
    rescale_config,
    rescale_spec,
    verify_scaling,
)
from .optimizer import (
    OptimizationProblem,
    OptimizationResult,
    objective,
    optimize,
)
from .runconfig import (
    GridSpec,
    OptimizerSettings,
    RunConfig,
    build_protocol,
    bundled_config_names,
    bundled_config_path,
    load_config,
    parse_config,
    save_config,
    serialize_config,
)

__version__ = "0.1.0"
