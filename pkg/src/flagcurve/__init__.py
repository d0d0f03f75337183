"""Flag representations of surface groups in SL(3,R): projective-plane
primitives, Fuchsian seeds and word balls, representation families,
limit-curve sampling, spectral certificates, and invariant-domain
experiments."""

__version__ = "0.1.0"

from .projective import (
    Flag,
    Frame,
    GroupElement,
    Pencil,
    ProjLine,
    ProjPoint,
    act,
    act_dual,
    act_flag,
    act_frame,
    canonicalize,
    dual,
    frame_from_flags,
    is_in_Y,
    join,
    meet,
    pairing,
    perp,
    perp_line,
    pi_minus,
    pi_plus,
)
from .surface import (
    CohomologyClass,
    FuchsianSeed,
    Presentation,
    Word,
    ball_count,
    enumerate_ball,
    eval_u,
    standard_fuchsian,
    translation_length,
)
from .reps import (
    RepSpec,
    coboundary_radial,
    evaluate,
    phi,
    phi_conjugate,
    rho0,
    sl2_flows,
    spec_from_json_dict,
)
from .spectral import (
    CartanTriple,
    EigenTriple,
    attractive_flag,
    cartan,
    eigen3,
    is_loxodromic,
    repulsive_flag,
    saddle_at_e2,
)
from .curve import (
    CurveModel,
    CurveSample,
    check_incidence,
    injectivity_report,
    product_structure_report,
    regularity_diagnostics,
    sample_limit_curve,
)
from .certify import (
    CertifyResult,
    StableNormEstimate,
    anosov_rates,
    certify_anosov,
    probe_explicit,
    stable_norm,
)
from .delta import DeltaFit, DeltaModel, fit_delta, pushforward_deviation
from .domain import (
    FiberProfile,
    OmegaQuery,
    RecurrenceReport,
    fiber_profile,
    in_omega,
    omega0_chart,
    recurrence_experiment,
)
