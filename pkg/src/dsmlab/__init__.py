"""Numerical laboratory for the double standard circle map family.

The family f(x) = 2x + a + (b/pi) sin(2 pi x) mod 1 and its complex
extension g(z) = e^{2 pi i a} z^2 exp(bz - b/z): tongue classification,
multiplier/critical-angle uniformization of tongues, the maximal chaotic
Cantor set as a conformal repeller, and its Hausdorff dimension through the
pressure equation.
"""

from .core import (
    Parameter,
    circle_dist,
    critical_points,
    deriv_circle,
    deriv_complex,
    eval_circle,
    eval_complex,
    eval_lift,
    mod1,
    reflect,
)
from .cycles import (
    AttractingCycle,
    OrbitType,
    TongueClassification,
    TongueStatus,
    classify,
    distinguished_point,
    find_attracting_cycle,
    multiplier,
    orbit_type,
    semiconjugacy_phi,
)
from .errors import (
    ContinuationError,
    CycleError,
    DomainError,
    DsmError,
    LinearizationError,
    MarkovError,
    RangeError,
)
from .linearize import (
    KoenigsFrame,
    UniformizingValue,
    critical_angle,
    invert_uniformization,
    koenigs_frame,
    koenigs_value,
    superattracting_parameters,
    trace_internal_ray,
    uniformize,
)
from .qc_model import (
    AngleMap,
    RadialPowerMap,
    angle_map_eval,
    chi_eval,
    conjugated_multiplier,
    dilatation_bound,
)
from .repeller import (
    BasinArcs,
    CylinderSet,
    MarkovPartition,
    cover_length,
    dump_cylinders_csv,
    immediate_basin_arcs,
    markov_partition,
    refine_cylinders,
)
from .thermo import (
    DimensionEstimate,
    DimensionFieldRow,
    PressureBracket,
    SmoothnessReport,
    bowen_dimension,
    box_counting_estimate,
    dimension_field,
    pressure_bracket,
    smoothness_diagnostic,
    write_dimension_csv,
)
from .cli import ScanConfig, ScanResult, render_ppm, run_subcommand, scan_tongues

__version__ = "0.1.0"
