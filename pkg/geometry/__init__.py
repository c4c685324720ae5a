"""
Star-shaped planar domains, their boundary geometry and perturbation fields.
"""
