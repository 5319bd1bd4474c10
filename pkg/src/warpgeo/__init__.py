"""Numerical geometry of surfaces in warped products R x_f M2(kappa).

Subpackages: ambient (warped metric and connection), immersion (surfaces
and jets), fundforms (fundamental forms and complex chart quantities),
compat (compatibility-equation residuals), conformal (conformal charts and
chart-identity residuals), graphsolve (prescribed-curvature rotational
graphs and height bounds), cli (command-line pipelines).
"""

__version__ = "0.1.0"
