"""
Environment-driven configuration for the plate laboratory.

Values are read once at import time; a ``.env`` file in the working directory
is honoured through python-dotenv.
"""
import os
from dotenv import load_dotenv

load_dotenv()

THREADS = int(os.getenv("PLATE_LAB_THREADS", str(os.cpu_count() or 1)))
BOUNDARY_GRID = int(os.getenv("PLATE_LAB_BOUNDARY_GRID", "256"))
FOURIER_LIMIT = int(os.getenv("PLATE_LAB_FOURIER_LIMIT", "32"))
RADIAL_NODES = int(os.getenv("PLATE_LAB_RADIAL_NODES", "48"))
ANGULAR_NODES = int(os.getenv("PLATE_LAB_ANGULAR_NODES", "128"))
CLUSTER_REL_TOL = float(os.getenv("PLATE_LAB_CLUSTER_REL_TOL", "1e-9"))
SCAN_STEPS = int(os.getenv("PLATE_LAB_SCAN_STEPS", "400"))
ROOT_REL_TOL = float(os.getenv("PLATE_LAB_ROOT_REL_TOL", "1e-14"))
EIG_RESIDUAL_TOL = float(os.getenv("PLATE_LAB_EIG_RESIDUAL_TOL", "1e-10"))
RITZ_DEGREE = int(os.getenv("PLATE_LAB_RITZ_DEGREE", "16"))
LOG_LEVEL = os.getenv("PLATE_LAB_LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
