"""
Exact, Monte Carlo and polynomial tools for checking the bunkbed inequality
`P(v- <-> w-) >= P(v- <-> w+)` on weighted graphs.

# Importable Attributes

- `bunkbed.conf.bunkbed_settings`: The current engine limits and defaults (caps, workers,
    Monte Carlo samples and seed). Set values on it directly, or via environmental
    variables such as `BUNKBED_EXACT_CAP`.

    ```python
    from bunkbed import bunkbed_settings
    bunkbed_settings.workers = 4
    ```

- `bunkbed.graph.WeightedGraph` and `bunkbed.graph.build_bunkbed`: Base graphs and their
    bunkbed doubles.
- `bunkbed.generators.generate`: The graph classes the inequality is known for.
- `bunkbed.exact.bunkbed_gap`: The exact gap, as a `fractions.Fraction`.
- `bunkbed.montecarlo.mc_bunkbed_gap`, `bunkbed.polynomial.gap_polynomial`,
    `bunkbed.reports.verify_local_symmetry`, `bunkbed.reports.verify_same_neighbors` and
    `bunkbed.search.verify_class` build on those.
"""
from .conf import bunkbed_settings, BunkbedSettings
from .graph import WeightedGraph, BunkbedGraph, build_bunkbed
from .generators import ClassSpec, generate, parse_class_spec
from .exact import bunkbed_gap, event_probability
from .montecarlo import mc_bunkbed_gap
from .polynomial import gap_polynomial, nonneg_on_unit_interval
from .reports import verify_local_symmetry, verify_same_neighbors
from .search import verify_class

__version__ = '0.1.0'
