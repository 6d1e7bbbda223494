"""Exact Novikov-homology invariants of classical knots and certified
bounds for Morse-Novikov numbers of knots, spun knots and superspun knots."""

from .algebra import LaurentPoly, PolyMatrix
from .engine import Base, BoundReport, Interval, Spin, Sum, derive, explain
from .knotio import KnotRecord, load_db, parse_braid, parse_pd
from .novikov import ModulePresentation, NovikovProfile, torsion_count, unit_gcd

__version__ = "0.1.0"
