"""Group-sparse representation toolkit for monaural singing-voice separation.

A unified inexact augmented Lagrangian solver covers six separation models
(rpca, rpcai, lrr, lrri, gsr, gsri) over magnitude spectrograms, with an
STFT front end, non-negative sparse-coding dictionary training,
pitch-informed harmonic masks, and projection-based separation metrics.
"""

from .annotation import PitchContour, annotation_matrix, harmonic_mask
from .dictionary import (
    Dictionary,
    NnscConfig,
    concat_dictionaries,
    sparse_code,
    split_activation,
    train_dictionary,
)
from .dsp import AudioClip, Spectrogram, istft, reconstruct_sources, resample_half, stft
from .errors import (
    CorruptFileError,
    DataFormatError,
    DegenerateInputError,
    NumericalError,
    UnsupportedFormatError,
)
from .fileio import load_dict, load_wav, parse_pitch, save_dict, save_wav, write_pitch
from .metrics import (
    DB_CAP,
    MetricReport,
    decompose,
    evaluate_separation,
    nsdr,
    sdr_sir_sar,
)
from .prox import (
    MatrixNorms,
    matrix_norms,
    singular_value_threshold,
    soft_threshold,
    soft_threshold_rows,
)
from .solvers import (
    DICTIONARY_METHODS,
    GROUP_SPARSE_METHODS,
    INFORMED_METHODS,
    METHODS,
    ProblemSpec,
    SeparationSolution,
    SolverConfig,
    SolverState,
    default_config,
    solve,
)
from .synth import (
    CHORD_NAMES,
    AudioFixture,
    SynthInstance,
    TimingRow,
    gen_audio_fixture,
    gen_chord_fixture,
    gen_group_sparse,
    run_scaling,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "AudioFixture",
    "CHORD_NAMES",
    "CorruptFileError",
    "DB_CAP",
    "DataFormatError",
    "DegenerateInputError",
    "Dictionary",
    "DICTIONARY_METHODS",
    "GROUP_SPARSE_METHODS",
    "INFORMED_METHODS",
    "METHODS",
    "MatrixNorms",
    "MetricReport",
    "NnscConfig",
    "NumericalError",
    "PitchContour",
    "ProblemSpec",
    "SeparationSolution",
    "SolverConfig",
    "SolverState",
    "Spectrogram",
    "SynthInstance",
    "TimingRow",
    "UnsupportedFormatError",
    "annotation_matrix",
    "concat_dictionaries",
    "decompose",
    "default_config",
    "evaluate_separation",
    "gen_audio_fixture",
    "gen_chord_fixture",
    "gen_group_sparse",
    "harmonic_mask",
    "istft",
    "load_dict",
    "load_wav",
    "matrix_norms",
    "nsdr",
    "parse_pitch",
    "reconstruct_sources",
    "resample_half",
    "run_scaling",
    "save_dict",
    "save_wav",
    "sdr_sir_sar",
    "singular_value_threshold",
    "soft_threshold",
    "soft_threshold_rows",
    "solve",
    "sparse_code",
    "split_activation",
    "stft",
    "train_dictionary",
    "write_pitch",
]
