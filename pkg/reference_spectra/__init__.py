"""
Semi-analytic reference spectra: Bessel determinants on the disk, the
separable Navier rectangle, and eigenvalue clustering.
"""
