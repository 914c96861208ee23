import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kickedatom.units import rb85_params


@pytest.fixture
def fig3_params():
    """N = 6, t_p = 250 ns, V_d/h = 7.24 MHz at exact resonance."""
    return rb85_params(pulse_duration=250e-9, depth_over_h_mhz=7.24, pulse_count=6)


@pytest.fixture
def fig2_dimensionless():
    """epsilon = 0.1, v_tilde = 1 (the model-comparison parameters)."""
    from kickedatom.units import DimensionlessParams

    return DimensionlessParams(epsilon=0.1, v_tilde=1.0)
