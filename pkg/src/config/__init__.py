from .config import (
    ARTIFACT_VERSION,
    DEFAULT_C_GAMMA,
    DEFAULT_GAMMA_EXP,
    DEFAULT_C_T,
    DEFAULT_ALPHA_EXP,
    DEFAULT_C_EPS,
    DEFAULT_EPS_EXP,
    DEFAULT_C_M,
    DEFAULT_M_EXP,
    T_CEIL_GUARD,
    DEFAULT_RHO1,
    DEFAULT_RHO2,
    DEFAULT_DELTA,
    DEFAULT_LEVEL_Q,
    DEFAULT_CLIP_BOUND,
    DEFAULT_T_GRID,
    MIN_MOMENT_REPLICATES,
    RWMH_SCALE_NUMERATOR,
    MALA_STEP_NUMERATOR,
    IWAE_PROPOSAL_SCALE,
    IWAE_DEFAULT_PARTICLES,
    CSV_SIGNIFICANT_DIGITS,
    META_PREFIX,
    CONFIG_HASH_LENGTH,
    THREADS_ENV_VAR,
    PROGRESS_PERIOD,
    LOG_DIR,
    LOG_FILENAME,
    LOG_MAX_ENTRIES,
)

__all__ = [
    "ARTIFACT_VERSION",
    "DEFAULT_C_GAMMA",
    "DEFAULT_GAMMA_EXP",
    "DEFAULT_C_T",
    "DEFAULT_ALPHA_EXP",
    "DEFAULT_C_EPS",
    "DEFAULT_EPS_EXP",
    "DEFAULT_C_M",
    "DEFAULT_M_EXP",
    "T_CEIL_GUARD",
    "DEFAULT_RHO1",
    "DEFAULT_RHO2",
    "DEFAULT_DELTA",
    "DEFAULT_LEVEL_Q",
    "DEFAULT_CLIP_BOUND",
    "DEFAULT_T_GRID",
    "MIN_MOMENT_REPLICATES",
    "RWMH_SCALE_NUMERATOR",
    "MALA_STEP_NUMERATOR",
    "IWAE_PROPOSAL_SCALE",
    "IWAE_DEFAULT_PARTICLES",
    "CSV_SIGNIFICANT_DIGITS",
    "META_PREFIX",
    "CONFIG_HASH_LENGTH",
    "THREADS_ENV_VAR",
    "PROGRESS_PERIOD",
    "LOG_DIR",
    "LOG_FILENAME",
    "LOG_MAX_ENTRIES",
]
