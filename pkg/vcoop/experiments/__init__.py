from .presets import figure_preset
from .statistics import Summary, mean_confidence_interval, summarize
from .sweep import ResultRow, approx_v2v_summary, run_sweep, spec_hash, write_results_csv
