"""Adaptive Lagrange finite elements (k = 1, 2, 3) for the 2D Poisson equation.

The pipeline is SOLVE -> ESTIMATE -> MARK -> REFINE:

>>> from afem2d import AfemConfig, afem_loop, benchmark_gaussian_bump
>>> result = afem_loop(AfemConfig(degree=1, maxIt=3), benchmark_gaussian_bump())
>>> len(result.records)
3
"""

from .adapt import RefinedMesh, bisect, conformity_errors, mark, uniform_refine
from .assembly import (
    SolverError,
    apply2d,
    assem2d,
    boundary_dofs,
    error_norm,
    integral2d,
    interp2dMat,
    solve_sparse,
)
from .driver import (
    AfemConfig,
    AfemResult,
    IterationRecord,
    afem_loop,
    export_csv,
    export_mesh_svg,
    fit_rate,
    read_csv,
    solve_poisson,
)
from .elements import FeSpace, basis_eval, build_dof_map, interpolate
from .estimator import elem2edgeInterp, indicator, jump_term, residual_term
from .mesh import FeMesh, Mesh, MeshError, build_fe_mesh, mesh_to_svg, read_mesh, square_mesh, write_mesh
from .predicate import PredicateSyntaxError, parse_boundary_predicate
from .problems import (
    PdeData,
    benchmark_gaussian_bump,
    load_problem_file,
    polynomial_problem,
    problem_from_expression,
    sine_problem,
)
from .quadrature import quadpts1, quadpts2, quadptsBd

__version__ = "0.1.0"
