from .ImageGenerator import ImageMarginal, gen_synthetic_image, gen_image_pair, image_pair_to_problem, grid_cost
from .ExactOracle import exact_ot_small, exact_ot_plan
from .SlopeFit import fit_loglog_slope
from .ExperimentBatch import ExperimentRecord, ExperimentBatch, run_cell, format_records_csv, write_records_csv
from .ScalingExperiments import run_scaling_experiment, run_batch_experiment, run_eps_experiment, mean_ops, ops_slope
