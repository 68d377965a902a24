SNAPSHOT_MAGIC = b"NLS3"
SNAPSHOT_VERSION = 1

MIN_POINTS = 8
BOX_DIMENSIONS = (1, 2, 3)
RADIAL_DIMENSION = 5
MORAWETZ_DIMENSIONS = (1, 2)

MASS_RESONANCE_RTOL = 1e-12
POTENTIAL_FLOOR = 1e-300

GS_DEFAULT_TOL = 1e-11
GS_TOL_RANGE = (1e-12, 1e-6)
GS_MAX_ITER = 5000
GS_SEED_AMPLITUDES = (3.0, 3.0, 2.0)
GS_COLLAPSE_FLOOR = 1e-14
GS_RESIDUAL_LIMIT = 1e-9
GS_NEGATIVE_LIMIT = -1e-6

SHOOTING_BRACKET = (1.0, 40.0)

DT_SAFETY = 0.5
RK4_SUBSTEPS = 4
BLOWUP_MODULUS = 1e6
BLOWUP_KINETIC_GROWTH = 1e6
CN_TOL = 1e-8
CN_MAX_SUBSTEPS = 1024

CUTOFF_EPS_RANGE = (0.01, 0.5)
XI_GUARD = 1e-14
R_NODES = 16
EDGE_MASS_TOL = 1e-6
SCATTER_PLATEAU = 1e-3
