"""The adaptive loop SOLVE -> ESTIMATE -> MARK -> REFINE and its outputs."""

import csv
import logging
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .adapt import bisect, mark
from .assembly import apply2d, assem2d, error_norm
from .elements import build_dof_map
from .estimator import indicator
from .mesh import build_fe_mesh, label_longest_edge, mesh_to_svg, square_mesh, write_mesh
from .quadrature import DEFAULT_QUAD_ORDER

log = logging.getLogger(__name__)

CSV_COLUMNS = ("step", "N", "NT", "ndof", "eta", "errH1", "errL2", "marked", "seconds")


def solve_poisson(fe_mesh, pde, space, quadOrder):
    """Stiffness matrix, load vector, Dirichlet data on boundary part 1, solve."""
    kk = assem2d(fe_mesh, 1.0, "v.grad", "u.grad", space, quadOrder)
    ff = assem2d(fe_mesh, pde.f, "v.val", None, space, quadOrder)
    return apply2d(1, fe_mesh, kk, ff, space, pde.g_D)


@dataclass
class AfemConfig:
    rect: tuple = (0.0, 1.0, 0.0, 1.0)
    h1: float = 1 / 8
    h2: float = 1 / 8
    degree: int = 1
    quadOrder: int = None
    theta: float = 0.4
    maxIt: int = 30
    dof_budget: int = 200_000
    boundary_jump: bool = True
    bdStr: tuple = ()
    out_dir: str = None
    snapshots: tuple = (0, 20, 30)
    initial_mesh: object = None  # a Mesh; overrides rect/h1/h2

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if self.maxIt < 1:
            raise ValueError("maxIt must be at least 1")
        if self.degree not in (1, 2, 3):
            raise ValueError(f"degree must be 1, 2 or 3, got {self.degree}")
        if self.quadOrder is None:
            self.quadOrder = DEFAULT_QUAD_ORDER[self.degree]


@dataclass
class IterationRecord:
    step: int
    N: int
    NT: int
    ndof: int
    eta: float
    errH1: float
    errL2: float
    marked: int
    seconds: float


@dataclass
class AfemResult:
    records: list
    mesh: object
    uh: np.ndarray
    space: object = None
    fe_mesh: object = None
    eta: np.ndarray = field(default=None, repr=False)


def afem_loop(config, pde, on_record=None):
    """Run the adaptive loop.

    Each step builds the auxiliary mesh data, solves, estimates, records,
    then marks and bisects unless it is the last step or the dof budget is
    exhausted. `on_record` is called with every new record (e.g. to flush
    output as the run goes). Returns an :class:`AfemResult` for the last
    solved mesh. If a stage fails, the exception is re-raised with the
    records completed so far attached as ``exc.partial_records``.
    """
    if config.initial_mesh is not None:
        mesh = label_longest_edge(config.initial_mesh)
    else:
        mesh = square_mesh(config.rect, config.h1, config.h2)
    out = Path(config.out_dir) if config.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    records = []
    generation = None
    k, q = config.degree, config.quadOrder
    result = None
    try:
        for step in range(config.maxIt):
            t0 = time.perf_counter()
            fe_mesh = build_fe_mesh(mesh, config.bdStr)
            space = build_dof_map(fe_mesh, k)
            uh = solve_poisson(fe_mesh, pde, space, q)
            est = indicator(fe_mesh, space, uh, pde.f, q, include_boundary=config.boundary_jump)
            errL2 = error_norm(fe_mesh, space, uh, pde.uexact, pde.Du, "L2")
            errH1 = error_norm(fe_mesh, space, uh, pde.uexact, pde.Du, "H1")

            last = step == config.maxIt - 1 or space.ndof >= config.dof_budget
            marked = np.empty(0, dtype=np.int64) if last else mark(est.eta, config.theta)
            record = IterationRecord(
                step=step,
                N=mesh.N,
                NT=mesh.NT,
                ndof=space.ndof,
                eta=est.global_eta,
                errH1=errH1,
                errL2=errL2,
                marked=len(marked),
                seconds=time.perf_counter() - t0,
            )
            records.append(record)
            log.info(
                "step %d: ndof=%d eta=%.4e errH1=%.4e marked=%d",
                step, space.ndof, record.eta, errH1, len(marked),
            )
            if on_record is not None:
                on_record(record)
            if out is not None and step in config.snapshots:
                mesh_to_svg(mesh, out / f"mesh_step{step:02d}.svg")
            result = AfemResult(records, mesh, uh, space, fe_mesh, est.eta)
            if last:
                break
            refined = bisect(mesh, marked, generation)
            mesh, generation = refined.mesh, refined.generation
    except Exception as exc:
        # hand the completed iterations to the caller along with the error
        exc.partial_records = records
        raise
    if out is not None:
        mesh_to_svg(mesh, out / "mesh_final.svg")
        write_mesh(mesh, out / "mesh_final.txt")
    return result


def export_csv(records, path, timings=True):
    """Write records as CSV with columns ``CSV_COLUMNS``.

    ``timings=False`` writes 0 in the ``seconds`` column so that repeated
    runs produce identical files.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(csv_row(r, timings))
    return path


def csv_row(record, timings=True):
    row = [getattr(record, name) for name in CSV_COLUMNS]
    if not timings:
        row[-1] = 0.0
    return [repr(float(v)) if isinstance(v, float) else v for v in row]


def read_csv(path):
    """Inverse of :func:`export_csv`."""
    types = {f.name: f.type for f in fields(IterationRecord)}
    with Path(path).open(newline="") as fh:
        return [
            IterationRecord(**{k: (int(v) if types[k] in (int, "int") else float(v)) for k, v in row.items()})
            for row in csv.DictReader(fh)
        ]


def export_mesh_svg(mesh, path):
    return mesh_to_svg(mesh, path)


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def fit_rate(records, x="ndof", y="eta"):
    """Convergence rate over the last half of `records`.

    Fits ``log(y)`` against ``log(x)`` by least squares and returns the
    slope. Needs at least 5 records with positive values.
    """
    if len(records) < 5:
        raise ValueError(f"need at least 5 records to fit a rate, got {len(records)}")
    tail = records[len(records) // 2 :]
    xs = [getattr(r, x) for r in tail]
    ys = [getattr(r, y) for r in tail]
    return loglog_slope(xs, ys)
