import logging
import os

import appdirs

from chosenpath import __version__

USER_DATA = appdirs.user_data_dir("chosenpath", "chosenpath", roaming=True)

VERSION = __version__

DEBUG = False

# Every run is reproducible from this seed unless --seed is given
SEED = 0

FRONTIER_CAP = 10 ** 6

# None selects ceil(log2 n) + 2
REPETITIONS = None

#
# --------------------- BENCHMARK OPTIONS ---------------------
#

BENCH_N = 10 ** 4
BENCH_T = 64
BENCH_B1 = 1 / 3
BENCH_B2 = 2 / 11
BENCH_TRIALS = 200

SCALING_N = 4000
SCALING_FACTOR = 4
SCALING_INSTANCES = 10

#
# --------------------- ANALYSIS OPTIONS ---------------------
#

GRID_RESOLUTION = 400
CSV_DIGITS = 10
REGIME_BETAS = [0.25, 0.5, 0.75, 1.0]

#
# --------------------- VERIFICATION OPTIONS -------------------
#

VERIFY_TRIALS = 10 ** 4
VERIFY_N = 10 ** 4
VERIFY_T = 64
VERIFY_B1 = 1 / 3
VERIFY_B2 = 2 / 11

# The map-to-hash conversion is checked on small maps
LEMMA5_TRIALS = 10 ** 5
LEMMA5_N = 100
LEMMA5_T = 16
LEMMA5_B1 = 0.5
LEMMA5_B2 = 0.25

TRANSFORM_DIMENSION = 2 ** 20
TRANSFORM_B1 = 0.5
TRANSFORM_EPS = 0.05
TRANSFORM_TARGET_DIMENSION = 64 * 160
TRANSFORM_TRIALS = 1000
TRANSFORM_INPUTS = 10 ** 5

#
# --------------------- LOGGING OPTIONS -------------------
#

LOG_LEVEL = logging.INFO
FILE_LOGGING = False
CONSOLE_LOGGING = True
LOG_FILENAME = os.path.join(USER_DATA, "chosenpath.log")
LOG_MAXBYTES = 10 * 1024 * 1024
LOG_FORMAT = '%(name)s :: %(module)s [%(levelname)s] %(message)s'
