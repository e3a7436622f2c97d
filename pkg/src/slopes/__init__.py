"""Heights ("slopes") of global sections of explicitly metrized line bundles.

Two concrete families of lattices are implemented end to end:

* weight-12k cusp forms with integral q-expansions under the Petersson
  metric (``slopes.petersson``), and
* integer polynomials on the projective line under disc capacity metrics
  (``slopes.capacity``),

together with the shared exact SVP/successive-minima engine
(``slopes.lattice``), Chebyshev transforms on Okounkov bodies
(``slopes.chebyshev``), and empirical-measure diagnostics
(``slopes.measures``).  The ``slopes`` console script drives everything.
"""

from .errors import (
    DomainError,
    EnumerationBudgetError,
    FormulaMismatchError,
    NotPositiveDefiniteError,
    PrecisionError,
    PrecisionExhaustedError,
    SlopesError,
    ZeroSeriesError,
)
from .lattice import (
    GramForm,
    SlopeSpectrum,
    lll_reduce,
    shortest_vector,
    slope_spectrum,
    successive_minima,
)
from .qseries import (
    QSeries,
    basis_form,
    content,
    ord_infinity,
    series_delta,
    series_j,
    series_mul,
    series_pow,
)
from .scaled import ScaledReal

__version__ = "0.1.0"

__all__ = [
    "DomainError", "EnumerationBudgetError", "FormulaMismatchError",
    "NotPositiveDefiniteError", "PrecisionError", "PrecisionExhaustedError",
    "SlopesError", "ZeroSeriesError",
    "GramForm", "SlopeSpectrum", "lll_reduce", "shortest_vector",
    "slope_spectrum", "successive_minima",
    "QSeries", "basis_form", "content", "ord_infinity", "series_delta",
    "series_j", "series_mul", "series_pow",
    "ScaledReal",
    "__version__",
]
