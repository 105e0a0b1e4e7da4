"""Steinberg Lab

Exact finite-field computations around the Steinberg representation of
GL_n(F_q): the Tits building, apartment classes, group rings of unipotent
groups, positive torus actions and Chevalley-Warning style solvers.
"""

__version__ = "0.1.0"
