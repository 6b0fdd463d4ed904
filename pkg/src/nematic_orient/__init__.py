"""Orientability analysis of planar nematic line fields on multiply
connected domains.

The package decides whether energy-minimizing constrained Q-tensor
fields are orientable (liftable to a director field), by combining
harmonic-conjugate finite element solves with an integer quadratic
program over the hole degree classes.  See the module docstrings of
:mod:`nematic_orient.geometry`, :mod:`nematic_orient.harmonic` and
:mod:`nematic_orient.criterion` for the pipeline, and
:mod:`nematic_orient.cli` for the command-line entry points.
"""

from .tensor import (
    ElasticConstants,
    aux,
    aux_inverse,
    extract_director,
    is_uniaxial,
    planar_to_full,
    project,
    project_planar,
)
from .degree import (
    NonIntegerWindingError,
    WindingGapError,
    angular_increments,
    boundary_orientable,
    degree_sum,
    winding_number,
)
from .lifting import (
    FieldLift,
    LiftResult,
    canonical_field,
    lift_field,
    lift_path,
    witness_sign_product,
)
from .geometry import (
    Arc,
    BoundaryData,
    DomainSpec,
    Mesh,
    MeshError,
    Segment,
    boundary_data_from_file,
    preset,
    read_mesh,
    tangential_boundary_data,
    triangulate,
    write_mesh,
)
from .harmonic import (
    FluxInconsistencyError,
    FluxResult,
    HarmonicField,
    SolverError,
    assemble_D,
    compute_J,
    conormal_flux,
    field_energy,
    indicator_fields,
    solve_hg,
    solve_hi,
    solve_laplace,
)
from .criterion import (
    ComplexityError,
    CriterionReport,
    DiscretizationError,
    InconsistentFluxError,
    MinimizerField,
    Verdict,
    analyze_mesh,
    enumerate_and_minimize,
    q_energy,
    quadratic_value,
    reconstruct_minimizer,
    solve_c,
    two_hole_verdict,
)

__version__ = "1.0.0"

__all__ = [
    "Arc",
    "BoundaryData",
    "ComplexityError",
    "CriterionReport",
    "DiscretizationError",
    "DomainSpec",
    "ElasticConstants",
    "FieldLift",
    "FluxInconsistencyError",
    "FluxResult",
    "HarmonicField",
    "InconsistentFluxError",
    "LiftResult",
    "Mesh",
    "MeshError",
    "MinimizerField",
    "NonIntegerWindingError",
    "Segment",
    "SolverError",
    "Verdict",
    "WindingGapError",
    "analyze_mesh",
    "angular_increments",
    "assemble_D",
    "aux",
    "aux_inverse",
    "boundary_data_from_file",
    "boundary_orientable",
    "canonical_field",
    "compute_J",
    "conormal_flux",
    "degree_sum",
    "enumerate_and_minimize",
    "extract_director",
    "field_energy",
    "indicator_fields",
    "is_uniaxial",
    "lift_field",
    "lift_path",
    "planar_to_full",
    "preset",
    "project",
    "project_planar",
    "q_energy",
    "quadratic_value",
    "read_mesh",
    "reconstruct_minimizer",
    "solve_c",
    "solve_hg",
    "solve_hi",
    "solve_laplace",
    "tangential_boundary_data",
    "triangulate",
    "two_hole_verdict",
    "winding_number",
    "witness_sign_product",
    "write_mesh",
]
