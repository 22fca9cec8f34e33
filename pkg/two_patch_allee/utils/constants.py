import math
import os

CONFIG_PATH: str = os.getenv("ALLEE_CONFIG_PATH", default="")
THREADS: int = int(os.getenv("ALLEE_THREADS", default=1))

# Sawtooth caricature breakpoints
SAWTOOTH_LOW = 0.25
SAWTOOTH_HIGH = 0.75

# Default viability threshold of the cubic reaction
DEFAULT_VIABILITY = 0.5

# Peak of the cubic s(1-s)(s-1/2) on (0,1), attained at (3+sqrt(3))/6
CUBIC_HALF_MAX = math.sqrt(3) / 36

# Equilibrium solver defaults (normalized scale)
BRACKET_GRID = 20000
MIN_BRACKET_GRID = 1000
ROOT_TOL = 1e-12
DEDUP_TOL = 1e-8
X_WINDOW = (-1e-9, 1 + 1e-9)
TANGENCY_TOL = 1e-10
NEWTON_MAX_ITER = 50
NEWTON_MAX_DRIFT = 1e-6
NONNEGATIVE_TOL = 1e-12
RESIDUAL_TOL = 1e-10
ORIGIN_TOL = 1e-10

# |Re(lambda)| below this is treated as zero
NONHYPERBOLIC_TOL = 1e-9

# Brute-force oracle grid size and the margin around its search box
ORACLE_GRID = 2000
ORACLE_MARGIN = 1e-3
ORACLE_SEEDS_PER_CLUSTER = 25

# Sawtooth enumeration tolerances
SINGULAR_TOL = 1e-13
BREAKPOINT_TOL = 1e-12
SAWTOOTH_DEDUP_TOL = 1e-9

# Relative tolerance under which two certificate branches count as tied
TIE_RTOL = 1e-12

# Integrator defaults
RK4_STEP = 1e-2
REL_TOL = 1e-9
ABS_TOL = 1e-12
T_MAX = 1e4
CONVERGENCE_RADIUS = 1e-8
STALL_WINDOW = 10.0
CONVERGENCE_RESIDUAL = 1e-6
ATTRACTION_RADIUS = 1e-6
MAX_STEP = 1.0
DIVERGENCE_BOUND = 1e8
MIN_STEP = 1e-14

# Diffusion rate from which the mixing experiment integrates implicitly
STIFF_DIFFUSION = 1.0

# Sweep defaults: (lambda1, lambda2) in (0,4)^2 with D=1 keeps alpha, beta in (0,4)
SWEEP_RANGE = (0.0, 4.0)
SWEEP_STEPS = 400

# 17 significant digits round-trip an IEEE double
FLOAT_FORMAT = ".17g"

# Lightness of the fill per equilibrium count; fewer equilibria are darker
GRAY_BY_COUNT = {1: 0.25, 3: 0.55, 5: 0.80}

# Stroke colour and dash pattern of each certificate boundary
CERTIFICATE_STROKES = {
    "thm-main": ("#b2182b", "none"),
    "corollary": ("#2166ac", "6,3"),
    "thm-general-a": ("#1b7837", "2,2"),
    "sawtooth-predicate": ("#e08214", "8,2,2,2"),
}

# Skeleton of a region map image
SVG_DOCUMENT = """<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" \
viewBox="0 0 {width} {height}">
<defs>
<pattern id="hatch" patternUnits="userSpaceOnUse" width="6" height="6" \
patternTransform="rotate(45)">
<rect width="6" height="6" fill="#ffffff"/>
<line x1="0" y1="0" x2="0" y2="6" stroke="#000000" stroke-width="1.5"/>
</pattern>
</defs>
<title>{title}</title>
<g id="cells" shape-rendering="crispEdges" stroke="none">
{cells}
</g>
<g id="certificates" fill="none" stroke-width="1.5">
{certificates}
</g>
<g id="axes" font-family="{font_family}" font-size="12" stroke="#000000">
{axes}
</g>
<g id="legend" font-family="{font_family}" font-size="12">
{legend}
</g>
</svg>
"""

# One parameter cell
SVG_CELL = '<rect x="{x}" y="{y}" width="{width}" height="{height}" fill="{fill}"/>'

# One edge of a certified region
SVG_POLYLINE = '<polyline points="{points}" stroke="{stroke}" stroke-dasharray="{dash}"/>'

SVG_LINE = '<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>'

SVG_TEXT = '<text x="{x}" y="{y}" text-anchor="{anchor}" stroke="none">{text}</text>'

# Legend entry for a count fill
SVG_LEGEND_SWATCH = (
    '<rect x="{x}" y="{y}" width="14" height="14" fill="{fill}" stroke="#000000"/>'
    '<text x="{text_x}" y="{text_y}">{label}</text>'
)

# Legend entry for a certificate boundary
SVG_LEGEND_STROKE = (
    '<line x1="{x}" y1="{line_y}" x2="{x_end}" y2="{line_y}" stroke="{stroke}" '
    'stroke-dasharray="{dash}" stroke-width="1.5"/>'
    '<text x="{text_x}" y="{text_y}">{label}</text>'
)

# Skeleton of a phase-plane image
SVG_PHASE_DOCUMENT = """<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" \
viewBox="0 0 {width} {height}">
<title>{title}</title>
<rect width="{width}" height="{height}" fill="#ffffff"/>
<g id="nullclines" fill="none" stroke-width="1.5">
{nullclines}
</g>
<g id="equilibria" stroke="#000000" stroke-width="1">
{equilibria}
</g>
<g id="axes" font-family="{font_family}" font-size="12" stroke="#000000">
{axes}
</g>
<g id="legend" font-family="{font_family}" font-size="12">
{legend}
</g>
</svg>
"""

# One equilibrium
SVG_MARKER = '<circle cx="{x}" cy="{y}" r="4" fill="{fill}"/>'

# Legend entry for an equilibrium marker
SVG_LEGEND_MARKER = (
    '<circle cx="{x}" cy="{y}" r="4" fill="{fill}" stroke="#000000"/>'
    '<text x="{text_x}" y="{text_y}">{label}</text>'
)

# Stroke colour and dash pattern of the x and y nullclines
NULLCLINE_STROKES = {"x": ("#b2182b", "none"), "y": ("#2166ac", "6,3")}

# Marker fill by stability: attractors filled, the rest hollow
MARKER_FILLS = {"stable": "#000000", "unstable": "#ffffff", "nonhyperbolic": "#999999"}

# Points per nullcline polyline
NULLCLINE_SAMPLES = 1001

# Phase-plane window past the capacities (1, 1/gamma)
PHASE_WINDOW = 1.1

# Model used when neither --config nor ALLEE_CONFIG_PATH names a configuration file
DEFAULT_MODEL = {
    "form": "physical",
    "D": 1.0,
    "lambda1": 1.0,
    "lambda2": 1.0,
    "k1": 1.0,
    "k2": 1 / 3,
}

# Default D values of the perfect-mixing experiment
MIXING_D_LIST = "1,10,100,1000"

# Default number of sampled starts for extinction and basin estimates
N_SAMPLES = 200
