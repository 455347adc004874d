"""Software-defined adaptive MIMO link simulator for visible-light communication.

The package models a 2x2 intensity-modulated optical MIMO link end to end:
Gray-mapped QAM constellations, block framing with time-orthogonal training,
root-raised-cosine pulse shaping with an optional IF passband leg, a
Lambertian line-of-sight channel, least-squares channel estimation,
zero-forcing and diversity-combining detection, and a closed-loop controller
that adapts between spatial-multiplexing and spatial-diversity M-QAM modes.

Submodules
----------
constellation   Gray-mapped square QAM mapping, demapping, EVM
framing         training insertion, cyclic prefix, frame build/parse
waveform        pulse shaping, IF conversion, synchronization, IQ files
channel         optical MIMO channel generation and application
estimation      least-squares channel estimation and SNR extraction
detection       zero-forcing and maximum-ratio diversity detection
adaptation      BER prediction, mode thresholds, mode selection
metrics         link reports, error counting, CSV emission
link            end-to-end link runs, sweeps, calibration
transport       UDP frame transport for split tx/channel/rx processes
cli             command-line front end
"""

from vlclink.constellation import build_constellation, compute_evm, demap_symbols, map_bits
from vlclink.adaptation import ModeCode, AdaptPolicy, predict_ber, select_mode
from vlclink.link import ExperimentConfig, run_link, sweep, calibrate

__all__ = [
    "build_constellation",
    "map_bits",
    "demap_symbols",
    "compute_evm",
    "ModeCode",
    "AdaptPolicy",
    "predict_ber",
    "select_mode",
    "ExperimentConfig",
    "run_link",
    "sweep",
    "calibrate",
]

__version__ = "0.1.0"
