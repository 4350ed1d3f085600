"""driftwos - Monte Carlo solver for the Dirichlet problem of a∆u + b·∇u = 0."""

__version__ = "0.1.0"
