"""Design, analysis, and optimization toolkit for multi-tone sinusoidal FM
pulse waveforms, with phase-coded baselines for comparison."""

__version__ = "0.1.0"

from .gbf import (GbfArgs, GbfCoefficients, gbf_coefficients, gbf_oracle,
                  gbf_partial, truncation_order)
from .waveform import (ModulationIndices, SampledWaveform, TaperSpec,
                       RECTANGULAR, bundled_preset, extend_tones,
                       modulation_function, phase_function, pmepr,
                       random_thumbtack_init, rms_bandwidth_sq,
                       scale_to_bandwidth, spectral_efficiency,
                       spectrum_closed_form, swept_bandwidth, synthesize)
from .ambiguity import (AmbiguitySurface, CoefficientKernel,
                        DelayDopplerRegion, acf_closed_form, acf_direct,
                        af_closed_form, af_direct, af_direct_point,
                        af_region_volume, delay_band, first_null, isr,
                        mainlobe_mask, mainlobe_width, snap_delays)
from .optimize import (OptimizeOptions, OptimizeReport, QuadratureObjective,
                       StudyConfig, StudyReport, box_stats, build_objective,
                       minimize_af_volume, minimize_isr, objective_gradient,
                       trial_study)
from .phasecode import (PcWaveform, PhaseCode, aperiodic_acf, barker13,
                        can_optimize, isl, merit_factor, mseq,
                        pad_to_power_of_two, pc_synthesize, periodic_acf)
from . import serialize

__all__ = [
    "GbfArgs", "GbfCoefficients", "gbf_coefficients", "gbf_oracle",
    "gbf_partial", "truncation_order",
    "ModulationIndices", "SampledWaveform", "TaperSpec", "RECTANGULAR",
    "bundled_preset", "extend_tones", "modulation_function", "phase_function",
    "pmepr", "random_thumbtack_init", "rms_bandwidth_sq",
    "scale_to_bandwidth", "spectral_efficiency", "spectrum_closed_form",
    "swept_bandwidth", "synthesize",
    "AmbiguitySurface", "CoefficientKernel", "DelayDopplerRegion",
    "acf_closed_form", "acf_direct", "af_closed_form", "af_direct",
    "af_direct_point", "af_region_volume", "delay_band", "first_null",
    "isr", "mainlobe_mask", "mainlobe_width", "snap_delays",
    "OptimizeOptions", "OptimizeReport", "QuadratureObjective",
    "StudyConfig", "StudyReport", "box_stats", "build_objective",
    "minimize_af_volume", "minimize_isr", "objective_gradient", "trial_study",
    "PcWaveform", "PhaseCode", "aperiodic_acf", "barker13", "can_optimize",
    "isl", "merit_factor", "mseq", "pad_to_power_of_two", "pc_synthesize",
    "periodic_acf",
    "serialize",
    "__version__",
]
