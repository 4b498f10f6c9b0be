"""
Numerical Constants
Tolerances, caps and fixed constants shared by every module
"""

import math

# Standing assumptions
LOSS_GAP_BOUND = 0.5          # A1: |l_f(z) - l_g(z)| <= 1/2
V_CAP = 1.0                   # v(gamma) = min(eta0 * gamma^alpha, 1)
EULER = math.e

# Tolerances
MASS_TOL = 1e-12              # distributions sum to 1
NORMALIZATION_TOL = 1e-10     # densities integrate to 1
INEQUALITY_TOL = 1e-10        # slack >= -tol counts as a pass
IDENTITY_TOL = 1e-9           # exact identities under enumeration
LOGLOSS_TOL = 1e-9            # log-loss rows must be densities
EQUALIZER_TOL = 1e-9             # NML regret spread
MC_SIGMAS = 4.0               # MC agreement in standard errors

# Measure engine
EXACT_CAP = 10 ** 7           # max |Z|^n enumerated exactly
CHUNK_SIZE = 1 << 16          # samples per enumeration chunk
DEFAULT_MC_TRIALS = 2000
DEFAULT_SEED = 0

# Empirical complexity
EXACT_COVER_MAX = 15          # exhaustive cover search limit
EXACT_SIGNS_MAX = 20          # 2^n sign vectors enumerated up to this n
HAUSSLER_BUDGET = 200

# Conditions
ESI_TAIL_LEVELS = (1, 2, 3)
DEFAULT_GAMMA_GRID = (1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 0.5)

# Harness
SLOPE_TOLERANCE = 0.15
DEFAULT_N_LIST = (16, 32, 64, 128, 256, 512, 1024)
MIN_SLOPE_POINTS = 4
GRID_PER_SAMPLE = 2           # threshold grid points per observation
BOUNDED_B_RATIO = 2.0         # fit_bernstein B considered bounded across n
MC_BATCH = 250
