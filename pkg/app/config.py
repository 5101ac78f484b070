"""
Configuration Settings
Centralizes file paths, numeric tolerances, capacity bounds and the
defaults of the relay-network experiment.
"""

import math
from pathlib import Path

# -----------------------------------------------------------------------------
# Path Configurations
# -----------------------------------------------------------------------------
PROJECT_ROOT = Path(__file__).parent.parent.resolve()

CONFIG_DIR = PROJECT_ROOT / "configs"
DATA_OUTPUT_DIR = PROJECT_ROOT / "data" / "outputs"

DEFAULT_EXPERIMENT_CONFIG = CONFIG_DIR / "relay_network.json"
DEFAULT_RESULTS_CSV = DATA_OUTPUT_DIR / "throughput.csv"

# -----------------------------------------------------------------------------
# Numeric Tolerances
# -----------------------------------------------------------------------------
# A coefficient is accepted as a Gaussian integer within this distance
LATTICE_MEMBERSHIP_TOL = 1e-6
# Rank test for generator rows and reconstruction check of J·G
RANK_TOL = 1e-9
# Relative slack allowed on the per-packet power constraint
POWER_TOL = 0.01
# Standard errors of slack on the mean transmit power over a curve point
POWER_CHECK_SIGMAS = 5.0
POWER_CHECK_MIN_TRIALS = 30
# Computation rates closer than this are treated as ties
RATE_TIE_TOL = 1e-12

# -----------------------------------------------------------------------------
# Capacity Bounds
# -----------------------------------------------------------------------------
FACTOR_NORM_BOUND = 10**6
COSET_ENUMERATION_BOUND = 10**4
EXACT_QUANTIZER_MAX_DIM = 8
COEFF_SEARCH_MAX_USERS = 4

# -----------------------------------------------------------------------------
# Stack Decoder Defaults
# -----------------------------------------------------------------------------
STACK_HEAP_CAPACITY = 100_000
STACK_BRANCH_WIDTH = 9
STACK_METRIC_BIAS = 0.0
STACK_MAX_EXPANSIONS = 20_000

# -----------------------------------------------------------------------------
# Relay Network Experiment Defaults
# -----------------------------------------------------------------------------
# Filter taps as (magnitude, phase in radians)
RELAY_TAPS_POLAR = ((1.96, math.pi / 8), (0.98**2, math.pi / 4))
RELAY_MESSAGE_LENGTH = 100
RELAY_SHAPING_PRIME = 3
RELAY_SNR_GRID_DB = tuple(float(s) for s in range(0, 31, 2))
RELAY_TRIALS = 2000
RELAY_SEED = 20090601
# Noise-normalized Fano bias used by the shipped experiment config
RELAY_METRIC_BIAS = 1.0
RELAY_MAX_EXPANSIONS = 3000
PILOT_SAMPLES = 100_000
NUM_RELAYS = 2
NUM_USERS = 2

# -----------------------------------------------------------------------------
# Runtime
# -----------------------------------------------------------------------------
THREADS_ENV_VAR = "PNC_THREADS"

API_HOST = "127.0.0.1"
API_PORT = 8000
