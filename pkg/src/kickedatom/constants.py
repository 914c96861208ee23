"""Physical constants (CODATA 2018) and tabulated Rb85 D2-line data.

The atom/laser data file lives in ``kickedatom/data`` and follows the JSON
schema documented in the README: each transition carries a dipole matrix
element in units of e*a0 and a detuning in Hz.
"""

from __future__ import annotations

import json
from importlib import resources

HBAR = 1.054571817e-34      # reduced Planck constant [J s]
PLANCK_H = 6.62607015e-34   # Planck constant [J s] (exact)
EPS0 = 8.8541878128e-12     # vacuum permittivity [F/m]
C_LIGHT = 299792458.0       # speed of light [m/s] (exact)
KB = 1.380649e-23           # Boltzmann constant [J/K] (exact)
E_CHARGE = 1.602176634e-19  # elementary charge [C] (exact)
A0 = 5.29177210903e-11      # Bohr radius [m]
AMU = 1.66053906660e-27     # atomic mass unit [kg]

RB85_MASS = 84.911789738 * AMU  # [kg]
RB85_D2_WAVELENGTH = 780.241368e-9  # vacuum wavelength [m]


def default_atom_data_path() -> str:
    """Filesystem path of the packaged Rb85 D2 dataset."""
    return str(resources.files("kickedatom").joinpath("data/rb85_d2.json"))


def load_atom_data(path=None) -> dict:
    """Load an atom/laser JSON data file.

    Parameters
    ----------
    path : str or Path, optional
        External file to read. Defaults to the packaged Rb85 D2 dataset.
    """
    with open(path if path is not None else default_atom_data_path()) as fh:
        return json.load(fh)
