"""
Conforming Ritz eigensolver on star charts.
"""
