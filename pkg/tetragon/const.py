"""Constants for the tetragon monodromy engine."""

from fractions import Fraction
from typing import Final

DOMAIN: Final = "tetragon"

# Curve spec keys
CONF_NAME: Final = "name"
CONF_MODEL: Final = "model"
CONF_EQUATION: Final = "equation"
CONF_F2: Final = "f2"
CONF_F3: Final = "f3"
CONF_SUBSTITUTION: Final = "substitution"
CONF_PROJECTION: Final = "projection"
CONF_IMPROPER: Final = "improper"
CONF_INFINITY_CUT: Final = "infinity_cut"
CONF_REFERENCE_FIBER: Final = "reference_fiber"
CONF_HIRZEBRUCH_DEGREE: Final = "hirzebruch_degree"
CONF_TORUS_TYPE: Final = "torus_type"
CONF_RATIO: Final = "ratio"
CONF_TABLE_LINE: Final = "table_line"
CONF_EXPECT: Final = "expect"
CONF_PARAMETER: Final = "parameter"
CONF_MULTIPLIER: Final = "multiplier"
CONF_SINGULARITIES: Final = "singularities"
CONF_INFINITY_CONJUGATOR: Final = "infinity_conjugator"
CONF_INFINITY_POWER: Final = "infinity_power"
CONF_PRESIMPLIFY: Final = "presimplify"

# Curve models
MODEL_TETRAGONAL: Final = "tetragonal"
MODEL_SEXTIC: Final = "sextic"
MODEL_TORUS: Final = "torus"

MODELS: Final = (MODEL_TETRAGONAL, MODEL_SEXTIC, MODEL_TORUS)

# Default values
DEFAULT_HIRZEBRUCH_DEGREE: Final = 2
DEFAULT_COSET_LIMIT: Final = 10**7
DEFAULT_TIETZE_BUDGET: Final = 2000
DEFAULT_JOBS: Final = 1
DEFAULT_DPS: Final = 30
MAX_DPS: Final = 240

# Tracker step control
STEP_FLOOR: Final = Fraction(1, 2**40)
SEPARATION_FACTOR: Final = 3
POLYGON_SIDES: Final = 16
INITIAL_STEPS: Final = 8

# Epsilon neighbourhoods of singular fibers are a fraction of the gap to the nearest root
EPSILON_FRACTION: Final = Fraction(1, 4)
EPSILON_RETRIES: Final = 12

# Refinement width used when ordering branches
ORDER_EPS: Final = Fraction(1, 2**12)
ORDER_MAX_REFINE: Final = 60

# Exit codes
EXIT_OK: Final = 0
EXIT_PARSE: Final = 2
EXIT_HYPOTHESIS: Final = 3
EXIT_CERTIFICATION: Final = 4
EXIT_INCONCLUSIVE: Final = 5

# Certificate statuses attached to report claims
STATUS_EXACT: Final = "proved-exact"
STATUS_TRACKED: Final = "tracked-certified"
STATUS_HEURISTIC: Final = "heuristic"

# Completeness of an assembled presentation
COMPLETE: Final = "complete"
UPPER_BOUND: Final = "upper-bound"

# Report output formats
FORMAT_TEXT: Final = "text"
FORMAT_SCRIPT: Final = "script-export"

# Report attributes
ATTR_ORDER: Final = "order"
ATTR_ABELIANIZATION: Final = "abelianization"
ATTR_ALEXANDER: Final = "alexander"
ATTR_GAMMA: Final = "gamma"
ATTR_COMPLETENESS: Final = "completeness"
