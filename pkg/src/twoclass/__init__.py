"""Exact arithmetic for 2-class groups along a cyclotomic Z_2-tower.

Quadratic class numbers and units, unit indices of multiquadratic fields,
Kuroda's formula, Iwasawa bookkeeping and tower structure predictions.
"""

__version__ = "0.1.0"
