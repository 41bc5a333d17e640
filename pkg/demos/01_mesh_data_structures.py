"""
Mesh data structures on two triangles
=====================================

Build the auxiliary edge tables for a square split along its diagonal and
print them with 1-based indices.
"""

import numpy as np

from afem2d import Mesh, build_fe_mesh

# four vertices, two counterclockwise triangles sharing the diagonal 1-4
node = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
elem = np.array([[2, 4, 1], [3, 1, 4]]) - 1
fm = build_fe_mesh(Mesh(node, elem), bdStr=["x==1"])

# edges are sorted pairs; side i of a triangle is opposite vertex i
print("edge =\n", fm.edge + 1)
print("elem2edge =\n", fm.elem2edge + 1)
# +1 / -1 orientation of interior sides, 0 on the boundary
print("sgnelem =\n", fm.sgnelem)

# boundary parts: edges on x == 1 first, then everything else
for i, part in enumerate(fm.bdEdgeIdxType, start=1):
    print(f"boundary part {i}: edges {part + 1}")
print("edge lengths:", fm.he)
