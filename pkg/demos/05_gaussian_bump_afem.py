"""
Adaptive loop on the Gaussian bump
==================================

SOLVE -> ESTIMATE -> MARK -> REFINE with theta = 0.4, then fit the
convergence rates against the number of degrees of freedom. Results go to
``demo_output/`` as CSV and SVG.
"""

from pathlib import Path

from afem2d import AfemConfig, afem_loop, benchmark_gaussian_bump, export_csv, fit_rate

out = Path("demo_output")
for k in (1, 2):
    config = AfemConfig(degree=k, theta=0.4, boundary_jump=False, maxIt=100, dof_budget=20_000,
                        out_dir=str(out / f"p{k}"), snapshots=(0, 10, 20))
    res = afem_loop(config, benchmark_gaussian_bump())
    export_csv(res.records, out / f"p{k}" / "records.csv")
    last = res.records[-1]
    print(f"P{k}: {len(res.records)} steps, {last.ndof} dofs, eta {last.eta:.3e}, H1 error {last.errH1:.3e}")
    # optimal rate is -k/2 against ndof
    print(f"     rates: eta {fit_rate(res.records):.3f}, H1 {fit_rate(res.records, y='errH1'):.3f}")
