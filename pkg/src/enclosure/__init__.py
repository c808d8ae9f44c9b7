"""Enclosure-method numerical laboratory.

Forward synthesis of boundary data (Dirichlet-to-Neumann maps, Cauchy
pairs, space-time traces, Laplace-domain wave fields) for model hidden
sets, indicator functions built from that data, and reconstruction of
the hidden geometry from their large-parameter asymptotics.
"""

__version__ = "0.1.0"
