"""tensekit: vowel tenseness quantification from formant trajectories.

Bark-space formant angles over the 33-66% vowel window, trajectory
derivatives, tenseness acceleration and force, tense/lax classification,
the corpus statistics battery, and a Lagrangian forward simulator whose
outputs round-trip through the analysis pipeline.
"""

from .classify import (PairPolicy, PairVerdict, TensenessClass, classify_pair,
                       classify_theta, relative_by_deviation)
from .dynamics import (CavityGeometry, ForceConstants, ForceProfile,
                       OscillatorParams, SimState, f_tense, force_profile,
                       helmholtz_frequency, simulate_x, simulate_y_oscillator,
                       synth_track)
from .errors import (ConfigError, DataError, DomainError, FitError,
                     IndicatorError, ParseError, SimulationError,
                     TensekitError)
from .formants import (ExtractionConfig, LpcModel, estimate_f0, extract_track,
                       formants_from_lpc, lpc_coefficients, track_formants)
from .ingest import (AudioBuffer, CorpusManifest, FormantTrack, ManifestEntry,
                     format_track_csv, parse_manifest, parse_praat_formant,
                     parse_track_csv, read_wav, write_wav)
from .pipeline import (RecordRow, RecordsTable, RunConfig, format_records_csv,
                       load_records_csv, run_analyze, run_force, run_simulate,
                       run_stats)
from .scales import BARK_MAX, BARK_MIN, bark_to_hz, hz_to_bark
from .stats import (Anova2Result, SixNumberSummary, TestResult, anova2,
                    betainc_reg, f_tail, pearson, summarize, t_tail_two_sided,
                    welch_t)
from .tenseness import (DegenerateDegreeWarning, PolyModel, SegmentLabels,
                        TensenessRecord, VowelSegment, a_tense,
                        deviation_index, fit_poly, indicators,
                        instantaneous_theta, landmarks, sample_at, theta_n,
                        theta_f1_hz, z_derivative)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
