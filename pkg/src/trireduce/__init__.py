"""Singular symplectic reduction of three-qubit pure states under local unitaries."""

__version__ = "0.1.0"
