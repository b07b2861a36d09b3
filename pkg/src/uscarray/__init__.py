"""Simulator for arrays of weakly coupled cavities, each ultrastrongly
coupled to a two-level qubit: energy spectra with avoided level crossings
where one photon jointly excites two qubits, and the corresponding
vacuum-Rabi, pulse-driven and photon-hopping dynamics."""

__version__ = "0.1.0"

from . import dynamics, fock, model, spectrum  # noqa: F401
