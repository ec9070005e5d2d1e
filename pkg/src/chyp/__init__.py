"""Complex hyperbolic Dirichlet domain verification.

Modules
-------
hermitian   indefinite Hermitian forms, cross products, signatures
group       the reflection group, its orbit of p0 and the Klein model
charts      torus charts of bisector intersections
torus       global minimisation over tori and theta sweeps
dirichlet   intersection verdicts and the full domain report
golden      regression table of published minima
cli         the ``chyp`` command
"""
from .hermitian import (
    HermForm,
    HVec,
    Signature,
    cross2,
    cross3,
    herm_inner,
    hvec,
    projective_equal,
    restricted_cross,
    restricted_form,
    signature,
)
from .group import GroupData, IsometryClass, build_group, classify, gram, klein_model, polar_vectors, reduce_to_pu21, reflection
from .charts import Bisector, Chart, DegenerateChartError, boundary_slice, dist2_to, giraud_chart, norm_at, subspace_chart, triple_chart
from .torus import MinResult, TrigPoly, constrained_extrema, expand, global_min, sweep_min
from .dirichlet import DirichletReport, Verdict, full_report, pair_verdict

__version__ = "0.1.0"
