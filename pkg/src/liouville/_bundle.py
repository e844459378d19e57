"""Generation of the bundled 15-level model file from the model builder."""

import numpy as np

from .modelfile import Sweep, model_from_spec, serialize_model
from .models import WaveplateParams, rb87_waveplate

HEADER = """\
# 15-level 87Rb optically controlled waveplate, rates in units of Gamma_a.
# Generated by liouville._bundle from liouville.models.rb87_waveplate with the
# default WaveplateParams; x is the probe detuning delta_s.
"""


def rb87_model_file(params=None):
    p = params if params is not None else WaveplateParams()
    spec = rb87_waveplate(p.replace(delta_s=0.0))
    slope = np.zeros((15, 15), dtype=complex)
    for k in (11, 12, 13):
        slope[k, k] = -1.0
    return model_from_spec(spec, slope, Sweep("delta_s", -200.0, 200.0, 401),
                           observe=[("waveplate",)])


def rb87_model_text(params=None):
    return HEADER + serialize_model(rb87_model_file(params))


if __name__ == "__main__":
    import sys

    sys.stdout.write(rb87_model_text())
