# --- Constants ---
ARTIFACT_VERSION = "0.1.0"

# Schedules
DEFAULT_C_GAMMA = 0.001
DEFAULT_GAMMA_EXP = 0.5
DEFAULT_C_T = 1.0
DEFAULT_ALPHA_EXP = 0.5
DEFAULT_C_EPS = 1.0
DEFAULT_EPS_EXP = 0.0
DEFAULT_C_M = 10.0
DEFAULT_M_EXP = 0.0
T_CEIL_GUARD = 1e-9     # absorbs float noise in C_T * n**alpha on exact powers

# Preconditioners
DEFAULT_RHO1 = 0.9
DEFAULT_RHO2 = 0.999
DEFAULT_DELTA = 1e-8

# Levels / estimator
DEFAULT_LEVEL_Q = 0.5
DEFAULT_CLIP_BOUND = 10.0
DEFAULT_T_GRID = (2, 4, 8, 16, 32, 64, 128, 256, 512)
MIN_MOMENT_REPLICATES = 1000

# Kernels (artifact choices, not fixed by the method)
RWMH_SCALE_NUMERATOR = 2.4      # sigma_p = 2.4 / sqrt(q)
MALA_STEP_NUMERATOR = 0.5       # h = 0.5 / q

# IWAE fixture
IWAE_PROPOSAL_SCALE = 1.5
IWAE_DEFAULT_PARTICLES = 5

# Output
CSV_SIGNIFICANT_DIGITS = 17
META_PREFIX = "# meta:"
CONFIG_HASH_LENGTH = 16
THREADS_ENV_VAR = "MLMC_OPT_THREADS"
PROGRESS_PERIOD = 1000  # optimizer iterations between progress log lines

# Logs
LOG_DIR = "logs"
LOG_FILENAME = "logger.log"
LOG_MAX_ENTRIES = 5000
