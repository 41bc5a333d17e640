"""
Newest vertex bisection
=======================

Refine one corner of a mesh repeatedly. Completion keeps the mesh
conforming, and the angles never degrade.
"""

import numpy as np

from afem2d import bisect, conformity_errors, square_mesh

mesh = square_mesh([0, 1, 0, 1], 0.5, 0.5)
gen = None
for step in range(8):
    # mark every triangle touching the origin
    marked = np.flatnonzero(np.any(np.all(mesh.node[mesh.elem] == 0.0, axis=2), axis=1))
    out = bisect(mesh, marked, gen)
    mesh, gen = out.mesh, out.generation
    assert conformity_errors(mesh) == []
    print(f"step {step}: marked {len(marked)}, now {mesh.NT} triangles, max generation {gen.max()}")

print("smallest area", mesh.area().min())
