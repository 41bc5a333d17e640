"""Assembly of variational forms written as (coefficient, test, trial) triples.

A bilinear form ``int_K c * T(v) * S(u)`` is described by a coefficient and
two tokens such as ``"v.grad"`` and ``"u.grad"`` or ``"v.val"`` and
``"u.val"``; a linear form omits the trial token.

Coefficients may be given as a constant, a callable ``f(p)`` of an ``n x 2``
point array, a dof vector of the finite element space, or directly as a
coefficient matrix of shape ``(NT, nG)`` holding values at the quadrature
points of every element. The first three forms are converted to the last one
by :func:`interp2dMat`.
"""

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elements import barycentric_gradients, basis_eval
from .quadrature import quadpts2

log = logging.getLogger(__name__)

DENSE_LIMIT = 500

_TOKEN_COMPONENTS = {
    "val": (".val",),
    "dx": (".dx",),
    "dy": (".dy",),
    "grad": (".dx", ".dy"),
}


class SolverError(RuntimeError):
    """Linear solve failed; ``residual`` is the relative residual reached."""

    def __init__(self, message, residual=np.nan):
        super().__init__(message)
        self.residual = residual


def quad_points(fe_mesh, quadOrder):
    """Physical quadrature points, shape (NT, nG, 2), and the rule itself."""
    rule = quadpts2(quadOrder)
    pts = np.einsum("gi,tid->tgd", rule.lam, fe_mesh.node[fe_mesh.elem])
    return pts, rule


def _call_on_points(func, pts):
    NT, nG, _ = pts.shape
    vals = np.asarray(func(pts.reshape(-1, 2)), dtype=float)
    return np.broadcast_to(vals, (NT * nG,)).reshape(NT, nG)


def interp2dMat(source, wStr, fe_mesh, space, quadOrder):
    """Coefficient matrix: values of `source` at the quadrature points.

    Row ``t`` holds the values at the ``nG`` points of element ``t``. A
    callable or constant only supports ``wStr=".val"``; a dof vector of
    `space` supports every selector of :func:`~afem2d.elements.basis_eval`.
    """
    pts, rule = quad_points(fe_mesh, quadOrder)
    NT, nG = pts.shape[:2]
    if callable(source):
        if wStr != ".val":
            raise ValueError(f"selector {wStr!r} needs a finite element function, got a callable")
        return _call_on_points(source, pts)
    arr = np.asarray(source, dtype=float)
    if arr.ndim == 0:
        if wStr != ".val":
            return np.zeros((NT, nG))
        return np.full((NT, nG), float(arr))
    if arr.shape != (space.ndof,):
        raise ValueError(f"dof vector has shape {arr.shape}, expected ({space.ndof},)")
    base = basis_eval(space.degree, rule.lam, wStr, fe_mesh)
    return np.einsum("ta,atg->tg", arr[space.elem2dof], base)


def as_coef_matrix(coef, fe_mesh, space, quadOrder):
    """Normalize any coefficient form to an ``(NT, nG)`` matrix."""
    nG = quadpts2(quadOrder).n_points
    if not callable(coef):
        arr = np.asarray(coef, dtype=float)
        if arr.ndim == 2:
            if arr.shape != (fe_mesh.NT, nG):
                raise ValueError(
                    f"coefficient matrix has shape {arr.shape}, expected ({fe_mesh.NT}, {nG}) "
                    f"for quadrature order {quadOrder}"
                )
            return arr
    return interp2dMat(coef, ".val", fe_mesh, space, quadOrder)


def _parse_token(token, prefix):
    if not isinstance(token, str) or "." not in token:
        raise ValueError(f"malformed form token {token!r}")
    var, what = token.split(".", 1)
    if var != prefix or what not in _TOKEN_COMPONENTS:
        raise ValueError(f"unsupported token {token!r}; expected {prefix}.val/.dx/.dy/.grad")
    return what


def _component_tables(what, space, fe_mesh, lam, Dlambda):
    return [basis_eval(space.degree, lam, sel, fe_mesh, Dlambda) for sel in _TOKEN_COMPONENTS[what]]


def assem2d(fe_mesh, coef, test, trial, space, quadOrder):
    """Assemble a bilinear form (sparse matrix) or a linear form (vector).

    With ``trial=None`` the load vector ``l(Phi_i) = int c T(Phi_i)`` is
    returned; otherwise the CSR matrix ``a_ij = int c T(Phi_i) S(Phi_j)``.
    Gradient tokens contract componentwise and pair only with each other.
    """
    tv = _parse_token(test, "v")
    tu = None if trial is None else _parse_token(trial, "u")
    if tu is not None and (tv == "grad") != (tu == "grad"):
        raise ValueError(f"cannot pair {test!r} with {trial!r}")
    c = as_coef_matrix(coef, fe_mesh, space, quadOrder)
    rule = quadpts2(quadOrder)
    Dlambda, area = barycentric_gradients(fe_mesh)
    cw = c * rule.weight[None, :] * area[:, None]  # (NT, nG)
    T = _component_tables(tv, space, fe_mesh, rule.lam, Dlambda)
    elem2dof = space.elem2dof
    if tu is None:
        local = np.einsum("tg,atg->ta", cw, T[0])
        return np.bincount(elem2dof.ravel(), weights=local.ravel(), minlength=space.ndof)
    S = _component_tables(tu, space, fe_mesh, rule.lam, Dlambda)
    local = sum(np.einsum("tg,atg,btg->tab", cw, Ti, Si) for Ti, Si in zip(T, S))
    nk = elem2dof.shape[1]
    rows = np.repeat(elem2dof, nk, axis=1).ravel()
    cols = np.tile(elem2dof, (1, nk)).ravel()
    A = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(space.ndof, space.ndof))
    return A.tocsr()


def integral2d(fe_mesh, coef, space, quadOrder):
    """Integral of a coefficient over the domain and over each element.

    Returns
    -------
    total : float
    per_element : ndarray, shape (NT,)
    """
    c = as_coef_matrix(coef, fe_mesh, space, quadOrder)
    rule = quadpts2(quadOrder)
    per_element = fe_mesh.area * (c @ rule.weight)
    return float(per_element.sum()), per_element


def boundary_dofs(fe_mesh, space, on=1):
    """Dofs lying on boundary part `on` (1-based, as in ``bdEdgeType``)."""
    if not 1 <= on <= len(fe_mesh.bdEdgeIdxType):
        raise ValueError(f"boundary part {on} does not exist (mesh has {len(fe_mesh.bdEdgeIdxType)})")
    edges = fe_mesh.bdEdgeIdxType[on - 1]
    nodes = fe_mesh.bdNodeIdxType[on - 1]
    return np.unique(np.concatenate([nodes, space.edge2dof[edges].ravel()])).astype(np.int64)


def solve_sparse(A, b, tol=1e-10, maxiter=None, x0=None):
    """Solve the SPD system ``A x = b`` to relative residual `tol`.

    Small systems (fewer than ``DENSE_LIMIT`` unknowns) use a dense
    factorization; larger ones use conjugate gradients with a Jacobi
    preconditioner and at most ``10 * n`` iterations.
    """
    b = np.asarray(b, dtype=float)
    n = len(b)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n)
    if n < DENSE_LIMIT:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
        try:
            x = np.linalg.solve(dense, b)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular system ({exc})") from exc
    else:
        A = sp.csr_matrix(A)
        diag = A.diagonal()
        if np.any(diag <= 0):
            raise SolverError("matrix has a non-positive diagonal entry; not SPD")
        M = sp.diags(1.0 / diag)
        maxiter = 10 * n if maxiter is None else maxiter
        x, info = spla.cg(A, b, x0=x0, rtol=tol, atol=0.0, maxiter=maxiter, M=M)
        if info != 0:
            res = np.linalg.norm(b - A @ x) / bnorm
            raise SolverError(f"CG did not converge in {maxiter} iterations", res)
    res = np.linalg.norm(b - A @ x) / bnorm
    if not np.isfinite(res) or res > max(tol, 1e-13) * 10:
        raise SolverError(f"relative residual {res:.3e} exceeds tolerance {tol:.1e}", res)
    return x


def apply2d(on, fe_mesh, A, b, space, g_D, tol=1e-10):
    """Impose Dirichlet data on boundary part `on` and solve.

    Boundary dofs take the nodal values of `g_D`; their contribution is moved
    to the right-hand side and the remaining SPD system is solved for the
    free dofs. Returns the full dof vector.
    """
    fixed = boundary_dofs(fe_mesh, space, on)
    uh = np.zeros(space.ndof)
    if callable(g_D):
        uh[fixed] = np.asarray(g_D(space.dof_coords[fixed]), dtype=float)
    else:
        uh[fixed] = float(g_D)
    free = np.ones(space.ndof, dtype=bool)
    free[fixed] = False
    A = sp.csr_matrix(A)
    rhs = b - A @ uh
    A_ff = A[free][:, free]
    uh[free] = solve_sparse(A_ff, rhs[free], tol=tol)
    return uh


def dirichlet_system(on, fe_mesh, A, b, space, g_D):
    """Symmetric elimination as a full-size system.

    Constrained rows and columns are replaced by identity, and the
    right-hand side carries the Dirichlet values there. Solving it gives the
    same vector as :func:`apply2d`.
    """
    fixed = boundary_dofs(fe_mesh, space, on)
    g = np.zeros(space.ndof)
    g[fixed] = np.asarray(g_D(space.dof_coords[fixed]), dtype=float) if callable(g_D) else float(g_D)
    A = sp.csr_matrix(A)
    rhs = b - A @ g
    rhs[fixed] = g[fixed]
    keep = np.ones(space.ndof)
    keep[fixed] = 0.0
    K = sp.diags(keep)
    A_bc = (K @ A @ K + sp.diags(1.0 - keep)).tocsr()
    return A_bc, rhs


def error_norm(fe_mesh, space, uh, exact=None, exact_grad=None, which="H1", quadOrder=None):
    """Quadrature approximation of ``||u - uh||`` in L2, the H1 seminorm or H1.

    `exact` maps an ``n x 2`` point array to values and `exact_grad` to an
    ``n x 2`` array of gradients. ``which`` is ``"L2"``, ``"H1-semi"`` or
    ``"H1"``.
    """
    if which not in ("L2", "H1-semi", "H1"):
        raise ValueError(f"unknown norm {which!r}")
    k = space.degree
    if quadOrder is None:
        quadOrder = min(8, 2 * k + 2)
    pts, rule = quad_points(fe_mesh, quadOrder)
    NT, nG = pts.shape[:2]
    flat = pts.reshape(-1, 2)
    wa = fe_mesh.area[:, None] * rule.weight[None, :]
    total = 0.0
    if which in ("L2", "H1"):
        u = np.zeros((NT, nG)) if exact is None else _call_on_points(exact, pts)
        uhq = interp2dMat(uh, ".val", fe_mesh, space, quadOrder)
        total += np.sum(wa * (u - uhq) ** 2)
    if which in ("H1-semi", "H1"):
        if exact_grad is None:
            g = np.zeros((NT * nG, 2))
        else:
            g = np.broadcast_to(np.asarray(exact_grad(flat), dtype=float), (NT * nG, 2))
        gx = g[:, 0].reshape(NT, nG)
        gy = g[:, 1].reshape(NT, nG)
        uhx = interp2dMat(uh, ".dx", fe_mesh, space, quadOrder)
        uhy = interp2dMat(uh, ".dy", fe_mesh, space, quadOrder)
        total += np.sum(wa * ((gx - uhx) ** 2 + (gy - uhy) ** 2))
    return float(np.sqrt(total))
