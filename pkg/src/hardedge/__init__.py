"""Hard-edge Lax pairs, Painleve transcendents and the Fokker-Planck
equation of the beta-Laguerre ensemble."""

__version__ = "0.1.0"
