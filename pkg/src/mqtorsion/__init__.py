"""mqtorsion: exact torsion computations for the hyperelliptic modular
Jacobians J_1(M, MN) over multi-quadratic number fields, plus the resulting
classification of elliptic-curve torsion over those fields."""

__version__ = "0.1.0"
