"""
Foundation numerics: quadrature, Bessel evaluators, root scans, the dense
generalized eigensolver and Cartesian derivative bundles.
"""
