"""Kicked-atom quantum resonance simulations with finite-duration pulses."""

__version__ = "0.1.0"

from .units import (  # noqa: F401
    AtomLineData,
    DimensionlessParams,
    PhysicalParams,
    Transition,
    atom_line_from_file,
    derive_dimensionless,
    dipole_depth,
    rb85_params,
    rb85_params_for_dimensionless,
    scale_deltap,
    talbot_time,
)
