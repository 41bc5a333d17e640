"""
Assembly and the patch test
===========================

A polynomial of degree k is reproduced exactly by P_k elements. The solver
composes stiffness assembly, load assembly and Dirichlet elimination.
"""

from afem2d import build_dof_map, build_fe_mesh, error_norm, solve_poisson, square_mesh
from afem2d.problems import polynomial_problem

fm = build_fe_mesh(square_mesh([0, 1, 0, 1], 0.25, 0.25))

for k in (1, 2, 3):
    space = build_dof_map(fm, k)
    pde = polynomial_problem(k)  # u = (1 + x + 2y)^k
    uh = solve_poisson(fm, pde, space, quadOrder=2 * k)
    err = error_norm(fm, space, uh, pde.uexact, pde.Du, "H1")
    print(f"P{k}: {space.ndof:4d} dofs, H1 error {err:.2e}")
