"""
Exact solutions, energies and stability regimes for the wave equation
on the expanding interval ``0 < x < 1 + kt``.
"""

config: dict = {}
