"""One-class subspace SVDD models (GESSVDD, SSVDD, SVDD, ESVDD, OCSVM)."""

from ._core import (
    DataError,
    DualSolution,
    Model,
    NumericalError,
    UsageError,
    all_variants,
    display_name,
    knn_laplacian,
    linear_gram,
    load_model,
    metrics,
    model_from_string,
    parse_model_spec,
    pca_laplacian,
    rbf_kernel,
    solve_dual,
    train,
)

__all__ = [
    "DataError",
    "DualSolution",
    "Model",
    "NumericalError",
    "UsageError",
    "all_variants",
    "display_name",
    "knn_laplacian",
    "linear_gram",
    "load_model",
    "metrics",
    "model_from_string",
    "parse_model_spec",
    "pca_laplacian",
    "rbf_kernel",
    "solve_dual",
    "train",
]
