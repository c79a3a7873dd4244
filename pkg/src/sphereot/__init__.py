"""Equal-area partitions of the sphere via semi-discrete optimal transport.

Builds partitions of S^{n-1} whose cells all carry uniform mass 1/L,
verifies explicit diameter bounds on them, and uses them as a quadrature
rule for sliced Monge-Kantorovich distances with an a-priori error
certificate.
"""

from ._kernels import backend_name
from .constants import (
    ExtrinsicConstants,
    IntrinsicConstants,
    extrinsic_constants,
    intrinsic_constants,
)
from .geometry import (
    SphereSample,
    cap_lower_bound,
    cap_measure,
    chordal_distance,
    geodesic_distance,
    sample_uniform,
    sphere_area,
    unit_vector,
)
from .mk1d import EmpiricalMeasure, Projected1D, empirical_measure, moment, project, w_p_1d
from .partition import BoundReport, Partition, build_partition, cell_diameters, verify_bound
from .sliced import SlicedEstimate, error_certificate, sliced_mk_dense, sliced_mk_partition
from .transport import (
    CostKind,
    DualWeights,
    EmptyCellError,
    NonConvergenceError,
    SolveReport,
    assign,
    cell_masses,
    mk_distance,
    solve_dual,
)

__version__ = "0.1.0"
