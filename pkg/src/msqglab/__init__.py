"""Pseudo-vortex dynamics, Lagrangian blob transport and localization
diagnostics for the modified SQG family."""
from .errors import (
    AlignmentError,
    ConfigError,
    DisjointnessError,
    DomainError,
    ExtrapolationError,
    MSQGError,
    ProfileError,
    SearchFailure,
    SingularityError,
    StepRejected,
)
from .kernel import (
    AlphaParam,
    green,
    kernel_gradient_bound,
    kernel_regularized,
    kernel_velocity,
    phi_alpha,
    phi_formula,
)
from .pseudo_vortex import (
    PseudoVortexState,
    Thresholds,
    Trajectory,
    detect_self_similar_expansion,
    hamiltonian,
    pv_integrate,
    pv_integrate_rescaled,
    pv_rhs,
    search_self_similar_triple,
)
from .transport import BlobSpec, ParticleField, advect_step, field_velocities, init_blobs
from .external import LinearStrain, OtherVortices, RigidRotation, UniformTranslation, ZeroField
from .diagnostics import (
    LocalizationSpec,
    beta_bound,
    compute_diagnostics,
    fit_log_law,
    localization_time,
)

__version__ = "0.1.0"
