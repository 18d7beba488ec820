"""Classification toolkit for one-dimensional symmetry-protected phases:
finite-group second cohomology, projective edge representations of symmetric
matrix product states, fixed-point state constructors, charge-transfer
circuits, and interaction-norm bookkeeping."""

__version__ = "0.1.0"
