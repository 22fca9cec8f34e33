from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

import numpy as np

from two_patch_allee.models.certificates import (
    CertificateId,
    CertificateVerdict,
    check_corollary,
    check_thm_general_a,
    check_thm_main,
)
from two_patch_allee.models.equilibria import (
    Equilibrium,
    EquilibriumSet,
    SolverOptions,
    Stability,
    find_equilibria,
    nullcline_x,
    nullcline_y_residual,
)
from two_patch_allee.models.logger import Logger, print
from two_patch_allee.models.patches import (
    NormalizedParams,
    PatchParams,
    ReactionKind,
    Reactions,
    ReactionTag,
    State,
    denormalize,
    normalize,
    patch_reactions,
)
from two_patch_allee.models.sawtooth import check_sawtooth_predicate, sawtooth_equilibria_exact
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError, ExportError
from two_patch_allee.utils.utils import format_float, map_gray, ordered_map

Params = Union[PatchParams, NormalizedParams]


class Plane(str, Enum):
    # (lambda1, lambda2) with D, k1, k2 fixed
    LAMBDA = "lambda"
    # (alpha, beta) with gamma fixed
    ALPHA_BETA = "alpha-beta"


class Classifier(str, Enum):
    NUMERIC = "numeric"
    SAWTOOTH_EXACT = "sawtooth-exact"


@dataclass(frozen=True)
class Axis:

    # lower end of the axis
    min: float

    # upper end of the axis
    max: float

    # number of cells along the axis
    steps: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "steps", int(self.steps))
        if self.steps < 2:
            raise DomainError(f"an axis needs at least 2 steps, got {self.steps}")
        if not 0 <= self.min < self.max:
            raise DomainError(f"axis range must satisfy 0 <= min < max, got {self.min}:{self.max}")

    def centers(self) -> np.ndarray:
        """
        Cell centers along the axis.

        :return: array of length steps
        """
        width = (self.max - self.min) / self.steps
        return self.min + (np.arange(self.steps) + 0.5) * width

    def __str__(self) -> str:
        return f"{self.min:g}:{self.max:g}:{self.steps}"


def evaluate_certificate(
    certificate: CertificateId, params: Params, oracle: bool = False
) -> CertificateVerdict:
    """
    Evaluate a certificate on physical or normalized parameters, converting as needed.
    Normalized parameters are read with D = k1 = 1.

    :param certificate: certificate to evaluate
    :param params: parameters
    :param oracle: numeric upper condition for thm-general-a
    :return: verdict
    """
    if isinstance(params, PatchParams):
        p, n = params, normalize(params)
    else:
        p, n = denormalize(params, 1.0, 1.0), params
    match CertificateId(certificate):
        case CertificateId.THM_MAIN:
            return check_thm_main(p)
        case CertificateId.COROLLARY:
            return check_corollary(n)
        case CertificateId.THM_GENERAL_A:
            return check_thm_general_a(p, oracle=oracle)
        case CertificateId.SAWTOOTH_PREDICATE:
            return check_sawtooth_predicate(n)


@dataclass(frozen=True)
class SweepSpec:

    # parameter plane swept
    plane: Plane

    # first and second swept parameter
    x_axis: Axis
    y_axis: Axis

    # reaction; the cubic a is used for both patches
    reaction: ReactionKind = ReactionKind.cubic()

    # how cells are counted
    classifier: Classifier = Classifier.NUMERIC

    # certificates evaluated on every cell
    overlays: Tuple[CertificateId, ...] = ()

    # fixed physical parameters of the lambda plane
    D: float = 1.0
    k1: float = 1.0
    k2: float = 0.4

    # fixed capacity ratio of the alpha-beta plane
    gamma: Optional[float] = None

    # numeric upper condition for thm-general-a overlays
    oracle: bool = False

    # options of the numeric classifier
    solver: SolverOptions = SolverOptions()

    def __post_init__(self) -> None:
        object.__setattr__(self, "plane", Plane(self.plane))
        object.__setattr__(self, "classifier", Classifier(self.classifier))
        object.__setattr__(self, "overlays", tuple(CertificateId(c) for c in self.overlays))
        if len(set(self.overlays)) != len(self.overlays):
            raise DomainError("overlays must not repeat")
        if self.plane is Plane.LAMBDA:
            if not (self.D > 0 and 0 < self.k2 <= self.k1):
                raise DomainError(
                    f"the lambda plane needs D > 0 and 0 < k2 <= k1, "
                    f"got D={self.D}, k1={self.k1}, k2={self.k2}"
                )
        elif self.gamma is None or not 0 < self.gamma <= 1:
            raise DomainError(f"the alpha-beta plane needs gamma in (0,1], got {self.gamma}")
        sawtooth = self.reaction.tag is ReactionTag.SAWTOOTH
        if self.classifier is Classifier.SAWTOOTH_EXACT and not sawtooth:
            raise DomainError("the sawtooth-exact classifier needs the sawtooth reaction")
        for certificate in self.overlays:
            match certificate:
                case CertificateId.SAWTOOTH_PREDICATE:
                    if not sawtooth or not 0 < self.ratio < 0.5:
                        raise DomainError(
                            "sawtooth-predicate overlays need the sawtooth reaction "
                            f"and gamma in (0,1/2), got {self.reaction!r}, gamma={self.ratio}"
                        )
                case CertificateId.THM_GENERAL_A:
                    if self.reaction.tag is not ReactionTag.CUBIC:
                        raise DomainError("thm-general-a overlays need the cubic reaction")
                case _:
                    if self.reaction != ReactionKind.cubic(0.5):
                        raise DomainError(
                            f"{certificate.value} overlays need the cubic reaction with a=1/2"
                        )

    @property
    def ratio(self) -> float:
        """
        Capacity ratio of every cell.

        :return: k2/k1 on the lambda plane, gamma otherwise
        """
        if self.plane is Plane.LAMBDA:
            return self.k2 / self.k1
        return self.gamma

    @property
    def axis_names(self) -> Tuple[str, str]:
        if self.plane is Plane.LAMBDA:
            return "lambda1", "lambda2"
        return "alpha", "beta"

    def cell_params(self, a: float, b: float) -> Tuple[PatchParams, NormalizedParams]:
        """
        Parameters of the cell at (a, b).

        :param a: first swept parameter
        :param b: second swept parameter
        :return: physical and normalized parameters
        """
        viability = self.reaction.a if self.reaction.tag is ReactionTag.CUBIC else 0.5
        if self.plane is Plane.LAMBDA:
            p = PatchParams(self.D, a, b, self.k1, self.k2, viability, viability)
            return p, normalize(p)
        n = NormalizedParams(a, b, self.gamma)
        return denormalize(n, 1.0, 1.0, viability, viability), n

    def to_dict(self) -> Dict[str, Union[str, float, bool, list, dict, None]]:
        """
        Create a dictionary representation of this spec.

        :return: dictionary representation
        """
        return {
            "plane": self.plane.value,
            "x_axis": str(self.x_axis),
            "y_axis": str(self.y_axis),
            "reaction": self.reaction.to_dict(),
            "classifier": self.classifier.value,
            "overlays": [c.value for c in self.overlays],
            "D": self.D,
            "k1": self.k1,
            "k2": self.k2,
            "gamma": self.gamma,
            "oracle": self.oracle,
        }


class RegionCell(NamedTuple):

    # swept parameter values at the cell center
    x: float
    y: float

    # number of nonnegative equilibria, origin included
    count: int

    # the classifier reported a degeneracy
    degenerate: bool

    # overlay verdicts, aligned with SweepSpec.overlays
    certificates: Tuple[bool, ...]


@dataclass
class RegionMap:

    # sweep that produced the map
    spec: SweepSpec

    # cells, rows of constant y from the bottom, x increasing within a row
    cells: List[RegionCell]

    def counts(self) -> np.ndarray:
        """
        Equilibrium counts as a grid.

        :return: array of shape (y steps, x steps)
        """
        return np.array([c.count for c in self.cells]).reshape(
            self.spec.y_axis.steps, self.spec.x_axis.steps
        )

    def certified(self, certificate: CertificateId) -> np.ndarray:
        """
        Certified cells of one overlay as a grid.

        :param certificate: overlay
        :return: boolean array of shape (y steps, x steps)
        """
        index = self.spec.overlays.index(CertificateId(certificate))
        return np.array([c.certificates[index] for c in self.cells]).reshape(
            self.spec.y_axis.steps, self.spec.x_axis.steps
        )


def classify_cell(spec: SweepSpec, a: float, b: float) -> RegionCell:
    """
    Count equilibria and evaluate overlays at one parameter pair.

    :param spec: sweep specification
    :param a: first swept parameter
    :param b: second swept parameter
    :return: RegionCell
    """
    p, n = spec.cell_params(a, b)
    if spec.classifier is Classifier.SAWTOOTH_EXACT:
        found: EquilibriumSet = sawtooth_equilibria_exact(n)
    else:
        found = find_equilibria(n, patch_reactions(p, spec.reaction), spec.solver)
    verdicts = tuple(
        evaluate_certificate(certificate, p, spec.oracle).holds for certificate in spec.overlays
    )
    return RegionCell(float(a), float(b), len(found), found.degenerate, verdicts)


def run_sweep(spec: SweepSpec, threads: int = 1) -> RegionMap:
    """
    Classify every cell of the parameter grid.

    :param spec: sweep specification
    :param threads: worker count; the result does not depend on it
    :return: RegionMap in row-major order
    """
    pairs = [(a, b) for b in spec.y_axis.centers() for a in spec.x_axis.centers()]
    print(f"Sweeping {len(pairs)} cells of the {spec.plane.value} plane on {threads} thread(s)")
    cells = ordered_map(lambda pair: classify_cell(spec, *pair), pairs, threads)
    return RegionMap(spec, cells)


@dataclass
class ContainmentReport:

    # overlay examined; None for an empty report
    certificate: Optional[CertificateId]

    # certified non-degenerate cells whose count is not 1
    violations: List[RegionCell] = field(default_factory=list)

    # uncertified non-degenerate cells with count 1; only for iff certificates
    inverse_violations: List[RegionCell] = field(default_factory=list)

    # certified non-degenerate cells
    certified: int = 0

    # degenerate cells left out
    skipped: int = 0

    @property
    def fraction(self) -> Optional[float]:
        """
        Share of certified cells with a unique equilibrium.

        :return: fraction, or None without certified cells
        """
        if self.certified == 0:
            return None
        return 1 - len(self.violations) / self.certified

    @property
    def sound(self) -> bool:
        return not self.violations and not self.inverse_violations


def containment_report(
    region_map: RegionMap, certificate: Optional[CertificateId] = None
) -> ContainmentReport:
    """
    Compare an overlay with the counted equilibria.

    :param region_map: swept map
    :param certificate: overlay to examine; None gives an empty report
    :return: ContainmentReport
    """
    if certificate is None:
        return ContainmentReport(None)
    certificate = CertificateId(certificate)
    if certificate not in region_map.spec.overlays:
        raise DomainError(f"{certificate.value} is not among the overlays of this map")
    index = region_map.spec.overlays.index(certificate)
    iff = certificate is CertificateId.SAWTOOTH_PREDICATE
    report = ContainmentReport(certificate)
    for cell in region_map.cells:
        if cell.degenerate:
            report.skipped += 1
            continue
        if cell.certificates[index]:
            report.certified += 1
            if cell.count != 1:
                report.violations.append(cell)
        elif iff and cell.count == 1:
            report.inverse_violations.append(cell)
    if not report.sound:
        Logger.warning(
            f"{certificate.value}: {len(report.violations)} violations, "
            f"{len(report.inverse_violations)} inverse violations"
        )
    return report


def summarize(region_map: RegionMap) -> Dict[int, float]:
    """
    Area fraction of each equilibrium count.

    :param region_map: swept map
    :return: count -> share of cells, sorted by count
    """
    counts, sizes = np.unique([c.count for c in region_map.cells], return_counts=True)
    total = len(region_map.cells)
    return {int(c): int(s) / total for c, s in zip(counts, sizes)}


def _csv_header(spec: SweepSpec) -> List[str]:
    return ["axis1", "axis2", "count", "degenerate"] + [f"cert_{c.value}" for c in spec.overlays]


def export_csv(region_map: RegionMap, path: str) -> None:
    """
    Write a map as CSV, one row per cell in row-major order.

    :param region_map: swept map
    :param path: output file
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as out:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(_csv_header(region_map.spec))
            for cell in region_map.cells:
                writer.writerow(
                    [format_float(cell.x), format_float(cell.y), cell.count, int(cell.degenerate)]
                    + [int(c) for c in cell.certificates]
                )
    except OSError as e:
        raise ExportError(f"cannot write CSV to {path}: {e}") from e
    Logger.info(f"Wrote {len(region_map.cells)} cells to {path}")


def parse_csv(path: str, spec: SweepSpec) -> RegionMap:
    """
    Read a map written by export_csv.

    :param path: CSV file
    :param spec: sweep the file was produced from
    :return: RegionMap
    """
    try:
        with open(path, newline="", encoding="utf-8") as source:
            rows = list(csv.reader(source))
    except OSError as e:
        raise ExportError(f"cannot read CSV from {path}: {e}") from e
    if not rows or rows[0] != _csv_header(spec):
        raise ExportError(f"{path}: header does not match the sweep overlays")
    try:
        cells = [
            RegionCell(
                float(row[0]),
                float(row[1]),
                int(row[2]),
                bool(int(row[3])),
                tuple(bool(int(v)) for v in row[4:]),
            )
            for row in rows[1:]
        ]
    except (ValueError, IndexError) as e:
        raise ExportError(f"{path}: malformed row: {e}") from e
    expected = spec.x_axis.steps * spec.y_axis.steps
    if len(cells) != expected:
        raise ExportError(f"{path}: expected {expected} cells, found {len(cells)}")
    return RegionMap(spec, cells)


@dataclass(frozen=True)
class SvgStyle:

    # image size in pixels
    width: int = 720
    height: int = 600

    # space around the plot for ticks and labels
    margin: int = 60

    # space to the right of the plot for the legend
    legend_width: int = 170

    # image title; derived from the sweep when empty
    title: str = ""

    font_family: str = "sans-serif"


def _px(value: float) -> str:
    return f"{value:.3f}"


def _boundary_segments(mask: np.ndarray) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Grid-corner segments separating True cells from the rest, merged along straight runs."""
    rows, cols = mask.shape
    padded = np.pad(mask, 1, constant_values=False)
    segments = []
    # horizontal edges lie on corner row i between cell rows i - 1 and i
    for i in range(rows + 1):
        edge = padded[i, 1:-1] != padded[i + 1, 1:-1]
        j = 0
        while j < cols:
            if edge[j]:
                start = j
                while j < cols and edge[j]:
                    j += 1
                segments.append(((start, i), (j, i)))
            else:
                j += 1
    for j in range(cols + 1):
        edge = padded[1:-1, j] != padded[1:-1, j + 1]
        i = 0
        while i < rows:
            if edge[i]:
                start = i
                while i < rows and edge[i]:
                    i += 1
                segments.append(((j, start), (j, i)))
            else:
                i += 1
    return segments


def render_svg(region_map: RegionMap, style: SvgStyle = SvgStyle()) -> str:
    """
    Render a map as an SVG document.

    :param region_map: swept map
    :param style: layout
    :return: SVG text
    """
    spec = region_map.spec
    nx, ny = spec.x_axis.steps, spec.y_axis.steps
    left, top = style.margin, style.margin / 2
    right = style.width - style.legend_width
    bottom = style.height - style.margin
    if right <= left or bottom <= top:
        raise DomainError(f"style {style} leaves no room for the plot")
    cell_w, cell_h = (right - left) / nx, (bottom - top) / ny

    def corner(j: float, i: float) -> Tuple[float, float]:
        return left + j * cell_w, bottom - i * cell_h

    cells = []
    for index, cell in enumerate(region_map.cells):
        i, j = divmod(index, nx)
        x, y = corner(j, i + 1)
        fill = "url(#hatch)" if cell.degenerate else map_gray(cell.count)
        cells.append(
            constants.SVG_CELL.format(
                x=_px(x), y=_px(y), width=_px(cell_w), height=_px(cell_h), fill=fill
            )
        )

    certificates = []
    for certificate in spec.overlays:
        stroke, dash = constants.CERTIFICATE_STROKES[certificate.value]
        for start, end in _boundary_segments(region_map.certified(certificate)):
            points = " ".join(f"{_px(a)},{_px(b)}" for a, b in (corner(*start), corner(*end)))
            certificates.append(
                constants.SVG_POLYLINE.format(points=points, stroke=stroke, dash=dash)
            )

    x_name, y_name = spec.axis_names
    axes = [
        constants.SVG_LINE.format(x1=_px(left), y1=_px(bottom), x2=_px(right), y2=_px(bottom)),
        constants.SVG_LINE.format(x1=_px(left), y1=_px(bottom), x2=_px(left), y2=_px(top)),
    ]
    for fraction in (0.0, 0.5, 1.0):
        x_tick = left + fraction * (right - left)
        y_tick = bottom - fraction * (bottom - top)
        x_value = spec.x_axis.min + fraction * (spec.x_axis.max - spec.x_axis.min)
        y_value = spec.y_axis.min + fraction * (spec.y_axis.max - spec.y_axis.min)
        axes.append(
            constants.SVG_TEXT.format(
                x=_px(x_tick), y=_px(bottom + 16), anchor="middle", text=f"{x_value:g}"
            )
        )
        axes.append(
            constants.SVG_TEXT.format(
                x=_px(left - 6), y=_px(y_tick + 4), anchor="end", text=f"{y_value:g}"
            )
        )
    axes.append(
        constants.SVG_TEXT.format(
            x=_px((left + right) / 2), y=_px(bottom + 36), anchor="middle", text=x_name
        )
    )
    axes.append(
        constants.SVG_TEXT.format(
            x=_px(left - 40), y=_px((top + bottom) / 2), anchor="middle", text=y_name
        )
    )

    legend = []
    legend_x = right + 20
    row_y = top
    for count, label in ((1, "1 equilibrium"), (3, "3 equilibria"), (5, "5 equilibria")):
        legend.append(
            constants.SVG_LEGEND_SWATCH.format(
                x=_px(legend_x),
                y=_px(row_y),
                fill=map_gray(count),
                text_x=_px(legend_x + 22),
                text_y=_px(row_y + 12),
                label=label,
            )
        )
        row_y += 22
    legend.append(
        constants.SVG_LEGEND_SWATCH.format(
            x=_px(legend_x),
            y=_px(row_y),
            fill="url(#hatch)",
            text_x=_px(legend_x + 22),
            text_y=_px(row_y + 12),
            label="other / degenerate",
        )
    )
    row_y += 22
    for certificate in spec.overlays:
        stroke, dash = constants.CERTIFICATE_STROKES[certificate.value]
        legend.append(
            constants.SVG_LEGEND_STROKE.format(
                x=_px(legend_x),
                line_y=_px(row_y + 7),
                x_end=_px(legend_x + 14),
                stroke=stroke,
                dash=dash,
                text_x=_px(legend_x + 22),
                text_y=_px(row_y + 12),
                label=escape(certificate.value),
            )
        )
        row_y += 22

    if style.title:
        title = style.title
    elif spec.plane is Plane.LAMBDA:
        title = f"Equilibrium counts, D={spec.D:g}, k1={spec.k1:g}, k2={spec.k2:g}"
    else:
        title = f"Equilibrium counts, gamma={spec.gamma:g}"
    return constants.SVG_DOCUMENT.format(
        width=style.width,
        height=style.height,
        title=escape(title),
        cells="\n".join(cells),
        certificates="\n".join(certificates),
        font_family=escape(style.font_family),
        axes="\n".join(axes),
        legend="\n".join(legend),
    )


def export_svg(region_map: RegionMap, path: str, style: SvgStyle = SvgStyle()) -> None:
    """
    Write a map as a static SVG image.

    :param region_map: swept map
    :param path: output file
    :param style: layout
    """
    document = render_svg(region_map, style)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as out:
            out.write(document)
    except OSError as e:
        raise ExportError(f"cannot write SVG to {path}: {e}") from e
    Logger.info(f"Wrote region map image to {path}")



def _visible_runs(xs: np.ndarray, ys: np.ndarray, x_max: float, y_max: float) -> List[np.ndarray]:
    """Split a sampled curve into runs of consecutive points inside [0, x_max] x [0, y_max]."""
    inside = (xs >= 0) & (xs <= x_max) & (ys >= 0) & (ys <= y_max) & np.isfinite(ys)
    runs = []
    start = None
    for i, flag in enumerate(np.append(inside, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= 2:
                runs.append(np.column_stack((xs[start:i], ys[start:i])))
            start = None
    return runs


def _marker_fill(stability: Stability) -> str:
    match stability:
        case Stability.STABLE_NODE | Stability.STABLE_FOCUS:
            return constants.MARKER_FILLS["stable"]
        case Stability.NONHYPERBOLIC:
            return constants.MARKER_FILLS["nonhyperbolic"]
        case _:
            return constants.MARKER_FILLS["unstable"]


def render_nullclines(
    n: NormalizedParams,
    r: Reactions,
    found: Optional[Sequence[Equilibrium]] = None,
    style: SvgStyle = SvgStyle(),
    samples: int = constants.NULLCLINE_SAMPLES,
) -> str:
    """
    Render both nullclines of the normalized system and its equilibria as an SVG document.

    The window extends PHASE_WINDOW times past the capacities (1, 1/gamma). Stable
    equilibria are drawn filled, the others hollow.

    :param n: normalized parameters
    :param r: reaction(s)
    :param found: equilibria to mark; computed with find_equilibria when omitted
    :param style: layout
    :param samples: points per nullcline
    :return: SVG text
    """
    if samples < 2:
        raise DomainError(f"samples must be at least 2, got {samples}")
    if found is None:
        found = list(find_equilibria(n, r))
    x_max, y_max = constants.PHASE_WINDOW, constants.PHASE_WINDOW / n.gamma
    left, top = style.margin, style.margin / 2
    right = style.width - style.legend_width
    bottom = style.height - style.margin
    if right <= left or bottom <= top:
        raise DomainError(f"style {style} leaves no room for the plot")

    def pixel(x: float, y: float) -> Tuple[float, float]:
        return left + x / x_max * (right - left), bottom - y / y_max * (bottom - top)

    # x nullcline as y(x), y nullcline as x(y) read off the residual at x = 0
    xs = np.linspace(0.0, x_max, samples)
    ys = np.linspace(0.0, y_max, samples)
    curves = {
        "x": (xs, np.asarray(nullcline_x(n, r, xs), dtype=float)),
        "y": (np.asarray(nullcline_y_residual(n, r, State(np.zeros_like(ys), ys))), ys),
    }
    nullclines = []
    for name, (cx, cy) in curves.items():
        stroke, dash = constants.NULLCLINE_STROKES[name]
        for run in _visible_runs(cx, cy, x_max, y_max):
            points = " ".join(f"{_px(a)},{_px(b)}" for a, b in (pixel(*p) for p in run))
            nullclines.append(
                constants.SVG_POLYLINE.format(points=points, stroke=stroke, dash=dash)
            )

    markers = []
    for e in found:
        if 0 <= e.x <= x_max and 0 <= e.y <= y_max:
            x, y = pixel(e.x, e.y)
            markers.append(
                constants.SVG_MARKER.format(x=_px(x), y=_px(y), fill=_marker_fill(e.stability))
            )

    axes = [
        constants.SVG_LINE.format(x1=_px(left), y1=_px(bottom), x2=_px(right), y2=_px(bottom)),
        constants.SVG_LINE.format(x1=_px(left), y1=_px(bottom), x2=_px(left), y2=_px(top)),
    ]
    for fraction in (0.0, 0.5, 1.0):
        x_tick, y_tick = pixel(fraction * x_max, fraction * y_max)
        axes.append(
            constants.SVG_TEXT.format(
                x=_px(x_tick), y=_px(bottom + 16), anchor="middle", text=f"{fraction * x_max:.3g}"
            )
        )
        axes.append(
            constants.SVG_TEXT.format(
                x=_px(left - 6), y=_px(y_tick + 4), anchor="end", text=f"{fraction * y_max:.3g}"
            )
        )
    axes.append(
        constants.SVG_TEXT.format(
            x=_px((left + right) / 2), y=_px(bottom + 36), anchor="middle", text="x"
        )
    )
    axes.append(
        constants.SVG_TEXT.format(
            x=_px(left - 40), y=_px((top + bottom) / 2), anchor="middle", text="y"
        )
    )

    legend = []
    legend_x = right + 20
    row_y = top
    for name, label in (("x", "x nullcline"), ("y", "y nullcline")):
        stroke, dash = constants.NULLCLINE_STROKES[name]
        legend.append(
            constants.SVG_LEGEND_STROKE.format(
                x=_px(legend_x),
                line_y=_px(row_y + 7),
                x_end=_px(legend_x + 14),
                stroke=stroke,
                dash=dash,
                text_x=_px(legend_x + 22),
                text_y=_px(row_y + 12),
                label=label,
            )
        )
        row_y += 22
    for kind in ("stable", "unstable"):
        legend.append(
            constants.SVG_LEGEND_MARKER.format(
                x=_px(legend_x + 7),
                y=_px(row_y + 7),
                fill=constants.MARKER_FILLS[kind],
                text_x=_px(legend_x + 22),
                text_y=_px(row_y + 12),
                label=f"{kind} equilibrium",
            )
        )
        row_y += 22

    title = style.title or f"Nullclines, alpha={n.alpha:g}, beta={n.beta:g}, gamma={n.gamma:g}"
    return constants.SVG_PHASE_DOCUMENT.format(
        width=style.width,
        height=style.height,
        title=escape(title),
        nullclines="\n".join(nullclines),
        equilibria="\n".join(markers),
        font_family=escape(style.font_family),
        axes="\n".join(axes),
        legend="\n".join(legend),
    )


def export_nullclines(
    n: NormalizedParams,
    r: Reactions,
    path: str,
    found: Optional[Sequence[Equilibrium]] = None,
    style: SvgStyle = SvgStyle(),
) -> None:
    """
    Write the nullcline view of the normalized system as a static SVG image.

    :param n: normalized parameters
    :param r: reaction(s)
    :param path: output file
    :param found: equilibria to mark; computed when omitted
    :param style: layout
    """
    document = render_nullclines(n, r, found, style)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as out:
            out.write(document)
    except OSError as e:
        raise ExportError(f"cannot write SVG to {path}: {e}") from e
    Logger.info(f"Wrote nullcline image to {path}")
