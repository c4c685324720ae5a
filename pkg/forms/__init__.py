"""
Bilinear forms of the plate problem: quadrature grids, assembly over a basis
and values pulled back under deformations.
"""
