class Constants(object):

    def __init__(self):
        pass

    # Basis families, in rendering order
    FAMILY_ORDER = ("p", "q", "r", "s", "a", "b", "c", "d", "e", "f")
    DERIVED_FAMILIES = ("b", "c", "d", "e", "f")
    CORE_FAMILIES = ("p", "q", "r", "s", "a")

    # Reduced combos are printed with p last, as the reduction lemmas write them
    CORE_DISPLAY_ORDER = ("q", "a", "r", "s", "p", "b", "c", "d", "e", "f")

    # Largest index reached by the computation of the constant
    MAX_PAPER_INDEX = 7

    # Largest exponent accepted after "^" in a formula
    MAX_EXPONENT = 16

    # Reduction stages applied after the elimination of b, c, d, e, f
    STAGE_ORDER = ("p", "q", "rs", "a")

    # Quadrature defaults
    DEFAULT_TOL = 1e-10
    DEFAULT_TRUNCATION = 40.0
    GAUSS_ORDER = 20
    PANEL_WIDTH = 2.5
    MAX_REFINEMENT_DEPTH = 8
    ROUNDOFF_FACTOR = 50.0

    # Agreement required between two numeric evaluations of the same claim
    NUMERIC_TOL = 1e-8
    # Agreement required between the two T evaluation paths
    KERNEL_TOL = 1e-10

    # Binary64 mantissa bits
    DEFAULT_PRECISION = 53

    # Environment overrides of the command line flags
    ENV_PREFIX = "FGR_"

    FIXTURE_FILE = "claims.json"
    FIXTURE_VERSION = 1

    # Exit statuses
    EXIT_OK = 0
    EXIT_FAILED = 1
    EXIT_USAGE = 2
