"""walktrace: geometry of simple-random-walk traces on Z^4.

Simulation and numerical-verification toolkit for graph distance, effective
resistance, cut times, lattice Green's functions, and walk-intersection
probabilities on the trace graph of a simple random walk, with a seeded
Monte Carlo harness for their logarithmic-correction asymptotics.
"""

from .cuts import (BridgeSegment, CutTimeSet, bridge_decomposition,
                   find_cut_times, find_cut_times_bruteforce)
from .errors import CapacityError, InputError, NumericalError, ParameterError
from .estimator import (DoublingRow, EstimateRecord, ExperimentConfig,
                        ExperimentOptions, ExtrapolationResult, GapRow,
                        PsiSeries, TrialResult, doubling_check,
                        extrapolate_constant, gap_consistency, psi_series,
                        read_records_jsonl, run_experiment, run_trial,
                        write_records_jsonl, write_summary_csv)
from .greens import (GreensTable, auto_radius, expected_G_aggregate,
                     expected_G_aggregate_from_table, green_table,
                     killed_walk_aggregate_mc, read_greens_table,
                     return_probability, return_probability_series,
                     write_greens_table)
from .intersect import (IntersectionEstimate, IntervalScheme, big_f_prediction,
                        enumerate_F1_exact, estimate_F, estimate_f,
                        f_prediction, interval_scheme, longest_intersection_L,
                        segments_intersect)
from .rng import derive_seed, generator_for
from .trace import (ResistanceResult, TraceGraph, build_trace, dump_edge_list,
                    effective_resistance, graph_distance,
                    resistance_dense_oracle)
from .walks import (KillingTime, WalkPath, generate_walk, sample_killing_time,
                    sample_killing_times, step_directions)

__version__ = "0.1.0"
