"""Constants"""
import os


# field representations
PHYSICAL = "physical"
SPATIAL_FOURIER = "spatial-Fourier"
SPACETIME_FOURIER = "spacetime-Fourier"
VALID_SPACETIME_REPS = [PHYSICAL, SPATIAL_FOURIER, SPACETIME_FOURIER]
FOURIER = "Fourier"
VALID_SPATIAL_REPS = [PHYSICAL, FOURIER]

# cutoff profiles
SHARP = "sharp"
SMOOTH = "smooth"
VALID_PROFILES = [SHARP, SMOOTH]
DEFAULT_TRANSITION = 0.25

# composite symbol kinds
SHELL = "shell"
CONE = "cone"
SPATIAL = "spatial"
SPATIAL_BELOW = "spatial_below"
SHELL_CONE = "shell_cone"
SHELL_CONE_BELOW = "shell_cone_below"
SHELL_CONE_STRICTLY_BELOW = "shell_cone_strictly_below"
SHELL_CONE_ABOVE = "shell_cone_above"
SIGNED = "signed"
SECTOR = "sector"
SECTOR_BELOW = "sector_below"
VALID_SYMBOL_KINDS = [
    SHELL,
    CONE,
    SPATIAL,
    SPATIAL_BELOW,
    SHELL_CONE,
    SHELL_CONE_BELOW,
    SHELL_CONE_STRICTLY_BELOW,
    SHELL_CONE_ABOVE,
    SIGNED,
    SECTOR,
    SECTOR_BELOW,
]

# kernel norm variants
PLAIN = "plain"
GRADIENT_SCALED = "gradient-scaled"
RESOLVENT_SCALED = "resolvent-scaled"
VALID_KERNEL_VARIANTS = [PLAIN, GRADIENT_SCALED, RESOLVENT_SCALED]

# nonlinear systems
SCALAR_MODEL = "scalar-model"
WM_MODEL = "WM-model"
YM_SCHEMATIC = "YM-schematic"
MD_SCHEMATIC = "MD-schematic"
VALID_SYSTEMS = [SCALAR_MODEL, WM_MODEL, YM_SCHEMATIC, MD_SCHEMATIC]
# scaling exponent per component, fixed by N(λ^σφ, λ^{σ+1}Dφ) = λ^{σ+2}N(φ, Dφ)
SYSTEM_SIGMAS = {
    SCALAR_MODEL: ("1",),
    WM_MODEL: ("0",),
    YM_SCHEMATIC: ("1",),
    MD_SCHEMATIC: ("1/2", "1"),
}

TWO_THIRDS = "two-thirds"
NO_DEALIAS = "none"
VALID_DEALIAS = [TWO_THIRDS, NO_DEALIAS]
GRADIENT = "gradient"
GS_NORM = "gs"
BESOV_NORM = "besov"
VALID_ITERATION_NORMS = [GS_NORM, BESOV_NORM]
# differences below this fraction of the iterate norm are rounding noise
DIVERGENCE_FLOOR = 1e-12

# F_λ routes
X_ROUTE = "x"
Y_ROUTE = "y"
VALID_ROUTES = [X_ROUTE, Y_ROUTE]

# ensembles
GAUSSIAN_COMPLEX = "gaussian-complex"
UNIMODULAR_PHASE = "unimodular-random-phase"
VALID_AMPLITUDE_LAWS = [GAUSSIAN_COMPLEX, UNIMODULAR_PHASE]
MIN_ENSEMBLE_COUNT = 8

# estimate ids
STRICHARTZ = "strichartz"
LOCAL_STRICHARTZ = "local_strichartz"
ANGULAR_RECONSTRUCTION = "angular_reconstruction"
Y_L2 = "y_l2"
Y_OUTERBLOCK = "y_outerblock"
ENERGY = "energy"
HH = "HH"
HL_A = "HL-A"
HL_B = "HL-B"
C_I = "C_I"
C_II = "C_II"
C_III = "C_III"
VALID_PRODUCT_KINDS = [HH, HL_A, HL_B, C_I, C_II, C_III]
VALID_INCLUSION_ITEMS = [ANGULAR_RECONSTRUCTION, Y_L2, Y_OUTERBLOCK, ENERGY]
PROXY_FIDELITY = "proxy_fidelity"
VALID_ESTIMATES = (
    [STRICHARTZ, LOCAL_STRICHARTZ]
    + VALID_INCLUSION_ITEMS
    + VALID_PRODUCT_KINDS
    + [PROXY_FIDELITY]
)

# support lemmas
WIDE = "wide"
SMALL = "small"
B_TERM = "B-term"
VALID_LEMMAS = [WIDE, SMALL, B_TERM]
EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
VALID_SUPPORT_MODES = [EXHAUSTIVE, SAMPLED]

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
REJECTED = "rejected"

# subcommands
DECOMPOSE = "decompose"
NORMS = "norms"
SOLVE = "solve"
VERIFY = "verify"
SCATTER = "scatter"
SELFTEST = "selftest"
VALID_SUBCOMMANDS = [DECOMPOSE, NORMS, SOLVE, VERIFY, SCATTER, SELFTEST]

# data generators
RANDOM_DATA = "random"
MODE_DATA = "mode"
FILE_DATA = "file"
ZERO_DATA = "zero"
VALID_DATA_KINDS = [RANDOM_DATA, MODE_DATA, FILE_DATA, ZERO_DATA]

# report formats
JSON_FORMAT = "json"
CSV_FORMAT = "csv"
VALID_FORMATS = [JSON_FORMAT, CSV_FORMAT]

# numeric defaults
DEFAULT_CONE_CONSTANT = 1 / 8
DIAGONAL_MULTIPLICITY = 16
ANGLE_CEILING = 4.0
B_TERM_RANGE_CEILING = 4.0
EXHAUSTIVE_PAIR_CAP = 10**8
SAMPLED_PAIR_COUNT = 10**5
MODULATION_GUARD = 2
KERNEL_OVERSAMPLE = 4
WEIGHT_CACHE_SIZE = 4
CONE_RESIDUE_TOLERANCE = 1e-9
SPECTRAL_ZERO_TOLERANCE = 1e-12
MEMORY_BUDGET_POINTS = 2**26
HIGHER_DIMENSION_LIMIT = 6
SECTOR_CHUNK = 16384

OUTPUT_DIR_ENV = "WAVE_CALCULUS_OUT"

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
DEFAULT_CONFIG_PATH = os.path.join(SCRIPT_DIR, "default_config.json")
REPORT_SCHEMA_PATH = os.path.join(SCRIPT_DIR, "report_schema.json")
GOLDEN_DIR = os.path.join(SCRIPT_DIR, "golden")
