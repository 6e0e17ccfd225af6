"""Computable core of relativistic quantum information.

Subpackages: qstate (density matrices and measures), channel (quantum
operations and causality), lorentz (kinematics and little groups),
wavepacket (massive spin-1/2 packets), photon (polarization POVMs and
Doppler effects), horizon (Unruh and black-hole calculators), cli
(scenario runner).
"""
from . import channel, horizon, kernels, lorentz, photon, qstate, wavepacket

__version__ = "0.1.0"

__all__ = [
    "channel",
    "horizon",
    "kernels",
    "lorentz",
    "photon",
    "qstate",
    "wavepacket",
    "__version__",
]
