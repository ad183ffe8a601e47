"""framestats: directional statistics meets tight-frame theory.

Uniformity tests (Rayleigh, modified Rayleigh, Bingham), frame bounds
and potentials, Watson mixtures with EM fitting, and the planar
nematic order parameter - built around the fact that equal-weight
Watson mixtures over tight-frame directors have second moments exactly
I/d and are therefore invisible to the Bingham test.
"""

__version__ = "0.1.0"

from .core import (
    DiscreteMeasure,
    MomentSummary,
    SampleSet,
    measure_moments,
    moment_deviation,
    moment_summary,
)
from .exceptions import (
    ConvergenceError,
    DataFormatError,
    DimensionError,
    DomainError,
)
from .frames import (
    FrameBounds,
    PotentialReport,
    TightenResult,
    directional_force,
    fntf_defect_r2,
    fractional_potential,
    frame_bounds,
    frame_potential,
    gradient_tighten,
    harmonic_fntf_r2,
    is_fntf,
    potential_report,
    riesz_potential,
)
from .order import (
    OrderField,
    OrderResult,
    Rod,
    fisher_vs_q2_bridge,
    local_order_field,
    order_parameter,
    q2_matrix,
)
from .uniformity import (
    TestResult,
    bingham_test,
    modified_rayleigh_test,
    monte_carlo_null,
    rayleigh_test,
    sample_uniform,
)
from .watson import (
    EMFit,
    WatsonMixture,
    WatsonParams,
    fit_watson_mixture_em,
    mixture_second_moments,
    mode_widths,
    sample_mixture,
    sample_watson,
    watson_cos2_moment,
    watson_log_density,
    watson_normalizer,
)

__all__ = [
    "__version__",
    "ConvergenceError",
    "DataFormatError",
    "DimensionError",
    "DiscreteMeasure",
    "DomainError",
    "EMFit",
    "FrameBounds",
    "MomentSummary",
    "OrderField",
    "OrderResult",
    "PotentialReport",
    "Rod",
    "SampleSet",
    "TestResult",
    "TightenResult",
    "WatsonMixture",
    "WatsonParams",
    "bingham_test",
    "directional_force",
    "fisher_vs_q2_bridge",
    "fit_watson_mixture_em",
    "fntf_defect_r2",
    "fractional_potential",
    "frame_bounds",
    "frame_potential",
    "gradient_tighten",
    "harmonic_fntf_r2",
    "is_fntf",
    "local_order_field",
    "measure_moments",
    "mixture_second_moments",
    "mode_widths",
    "modified_rayleigh_test",
    "moment_deviation",
    "moment_summary",
    "monte_carlo_null",
    "order_parameter",
    "potential_report",
    "q2_matrix",
    "rayleigh_test",
    "riesz_potential",
    "sample_mixture",
    "sample_uniform",
    "sample_watson",
    "watson_cos2_moment",
    "watson_log_density",
    "watson_normalizer",
]
