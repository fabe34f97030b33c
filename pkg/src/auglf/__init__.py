"""Signed-radiance phase-space simulation of paraxial wave optics in flatland.

Coherent fields, their Wigner phase-space representation, light-field
transformers for thin optical elements, shear-based free-space transport,
and an independent Fresnel wave pipeline for cross-checking.
"""

from .core import (
    AugmentedLightField,
    BandwidthWarning,
    ClippedOrderWarning,
    ComplexField,
    DegenerateInputError,
    IntensityProfile,
    InvalidConfigurationError,
    NegativeIntensityWarning,
    ParaxialGuardWarning,
    PhaseSpaceGrid,
    RealnessError,
    SamplingWarning,
    ScenarioAbortError,
    TruncationWarning,
    make_grid,
    project_intensity,
    theta_to_u,
    u_to_theta,
)
from .wdf import (
    WdfOptions,
    analytic_wdf_rect_aperture,
    analytic_wdf_two_pinholes,
    wdf_from_field,
)
from .elements import (
    AmplitudeGrating,
    CodedAperture,
    CubicPhase,
    Hologram,
    Lens,
    PhaseGrating,
    PhasePlate,
    Pinhole,
    Prism,
    RectAperture,
    TwoPinholes,
    element_deflection,
    element_label,
    element_transmittance,
)
from .transformers import (
    LightFieldTransformer,
    apply_general_transformer,
    apply_shield_field,
    apply_transformer,
    canonical_transformer,
    compose_transformers,
    identity_transformer,
    relative_to_general,
    transformer_from_transmittance,
)
from .propagation import fraunhofer_rotate, shear_propagate
from .fresnel import apply_mask, fresnel_propagate
from .scenarios import (
    ComparisonReport,
    Element,
    FieldSource,
    OpticalTrain,
    PlaneWave,
    PointSource,
    Propagate,
    PsfSweepResult,
    StageRecord,
    TraceOptions,
    TrainTrace,
    cubic_phase_psf_sweep,
    hologram_record,
    intensity_skewness,
    normalized_cross_correlation,
    run_train,
    trace_train,
)

__version__ = "0.1.0"
