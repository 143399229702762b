"""Cross-validation, metrics and report rendering."""

from .benchmark import (BenchmarkReport, CellResult, benchmark_features,
                        evaluate_cell, extract_features, model_seed, run_benchmark)
from .folds import FoldPlan, stratified_folds
from .metrics import (accuracy, chance_baseline, confusion_matrix,
                      per_class_accuracy, subgroup_accuracy)
from .report import format_score, render_table1, render_table2, round_half_up
from .scaling import Scaler, Standardizer, apply_scaler, fit_scaler

__all__ = [
    "BenchmarkReport", "CellResult", "FoldPlan", "Scaler", "Standardizer",
    "accuracy", "apply_scaler", "benchmark_features", "chance_baseline",
    "confusion_matrix", "evaluate_cell", "extract_features", "fit_scaler",
    "format_score", "model_seed", "per_class_accuracy", "render_table1",
    "render_table2", "round_half_up", "run_benchmark", "stratified_folds",
    "subgroup_accuracy",
]
