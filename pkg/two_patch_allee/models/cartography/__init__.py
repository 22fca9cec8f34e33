from .cartography import (
    Axis,
    Classifier,
    ContainmentReport,
    Plane,
    RegionCell,
    RegionMap,
    SvgStyle,
    SweepSpec,
    classify_cell,
    containment_report,
    evaluate_certificate,
    export_csv,
    export_nullclines,
    export_svg,
    parse_csv,
    render_nullclines,
    render_svg,
    run_sweep,
    summarize,
)

__all__ = [
    "Axis",
    "Classifier",
    "ContainmentReport",
    "Plane",
    "RegionCell",
    "RegionMap",
    "SvgStyle",
    "SweepSpec",
    "classify_cell",
    "containment_report",
    "evaluate_certificate",
    "export_csv",
    "export_nullclines",
    "export_svg",
    "parse_csv",
    "render_nullclines",
    "render_svg",
    "run_sweep",
    "summarize",
]
