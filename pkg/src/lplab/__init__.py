"""Spectral toolkit for dyadic harmonic analysis and second-iterate experiments.

Library layout:

- ``grid``       band-limited periodic fields, heat flow, Leray projection
- ``dyadic``     dyadic partition of unity and Littlewood-Paley projectors
- ``spaces``     Besov norms, heat/Carleson characterizations, decay checks
- ``bilinear``   pseudo-product operators, kernel criterion, CM estimator
- ``nsops``      T1/T2, Picard iterates, region cutoffs and symbol catalog
- ``inflation``  grid-free dyadic-bump data and the norm-inflation experiment
- ``ensembles``  seeded reproducible field ensembles
- ``experiments``/``reports``/``cli``  experiment drivers and outputs
"""

__version__ = "0.1.0"
