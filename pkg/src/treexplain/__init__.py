"""treexplain: decision-path attribution and dispersion-score model selection
for tree ensembles."""

from .data import Dataset, FoldPlan, SplitPlan, load_csv, stratified_kfold, train_test_split
from .ensemble import (
    FittedModel,
    ModelSpec,
    accuracy,
    class_score,
    fit_model,
    load_model,
    predict_class,
    save_model,
)
from .explain import (
    ContributionBreakdown,
    ExplainScore,
    WeightVector,
    contributions,
    explain_cv_instance,
    explain_cv_model,
    feature_weights,
)
from .select import (
    CandidateResult,
    HyperGrid,
    SelectionReport,
    compare_methods,
    expand_grid,
    select_by_cv,
    select_by_fe,
)
from .tree import CartConfig, DecisionPath, TreeNode, decision_path, fit_cart, predict_value, used_features

__version__ = "0.1.0"

__all__ = [
    "Dataset", "SplitPlan", "FoldPlan", "load_csv", "train_test_split", "stratified_kfold",
    "CartConfig", "TreeNode", "DecisionPath", "fit_cart", "predict_value",
    "decision_path", "used_features",
    "ModelSpec", "FittedModel", "fit_model", "class_score", "predict_class",
    "accuracy", "save_model", "load_model",
    "ContributionBreakdown", "WeightVector", "ExplainScore", "contributions",
    "feature_weights", "explain_cv_instance", "explain_cv_model",
    "HyperGrid", "CandidateResult", "SelectionReport", "expand_grid",
    "select_by_fe", "select_by_cv", "compare_methods",
]
