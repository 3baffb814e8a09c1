import os

REL_PROJECT_ROOT = os.path.abspath(
    os.path.join(os.path.dirname(__file__), "..", "..")
)
LOGS_DIR = os.path.join(REL_PROJECT_ROOT, "log_folder", "logs")

# Relative tolerance under which a Heun coefficient counts as zero.
COEFF_ZERO_TOL = 1e-10
# |2mΩB - 1| below this is the logarithmic Frobenius branch.
INDICIAL_TOL = 1e-12

DEFAULT_TOL = 1e-12
DEFAULT_GRID_POINTS = 400
DEFAULT_MAX_ITER = 200
MIN_GRID_POINTS = 100

DEFAULT_SAMPLES = 4001
MIN_SAMPLES = 16
DEFAULT_FD_POINTS = 20000
MIN_FD_POINTS = 100

# Heun series length limits for evaluation on a radial grid.
SERIES_START_COUNT = 64
SERIES_MAX_COUNT = 4096

VERIFY_MISMATCH_TOL = 1e-3
VERIFY_OVERLAP_TOL = 0.999

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NO_ROOT = 3
EXIT_NO_CONVERGENCE = 4
EXIT_VERIFY_FAILED = 5

try:
    os.makedirs(LOGS_DIR, exist_ok=True)
except OSError as e:
    print(f"Warning: Could not create directories: {e}")
