"""Conditional inference trees with subgroup visualization.

Thin Python wrapper around the compiled extension. All public names come
from the C++ core; see the individual docstrings for details.
"""

from treeviz._treeviz import (
    ColumnKind,
    DataError,
    Dataset,
    FitControls,
    Tree,
    UsageError,
    discretize,
    fit,
    histogram,
    import_tree,
    kde,
    load_csv,
    palette,
    percentile_of,
    quantile,
    render_svg,
)

__all__ = [
    "ColumnKind",
    "DataError",
    "Dataset",
    "FitControls",
    "Tree",
    "UsageError",
    "discretize",
    "fit",
    "histogram",
    "import_tree",
    "kde",
    "load_csv",
    "palette",
    "percentile_of",
    "quantile",
    "render_svg",
]
