"""rigidlab: a desk-scale laboratory for random-walk dynamics.

Exact subresonant normal-form algebra, Lyapunov spectra via QR, uniform
expansion and uniform gap certificates on exterior powers, empirical and
stationary measure diagnostics, and entropy inequality bookkeeping.
"""

__version__ = "0.1.0"
