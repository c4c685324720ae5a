"""
Report output and bundled sample data.

- results_store: deterministic JSON/CSV writing and preset loading
"""

from .results_store import ResultsStore, load_presets
