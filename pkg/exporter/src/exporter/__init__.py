"""exporter: training, weight export, and reference oracles for certquad."""

from .export import UnsupportedLayer, export_weights, import_weights
from .models import ACTIVATIONS, ARCHITECTURES, ExperimentSpec, build_mlp, model_for
from .reference import reference_norm, reference_residual
from .targets import (
    DISC_DOMAIN,
    GAUSSIAN_DOMAIN,
    PINN_DOMAIN,
    gaussian_peak,
    pinn_solution,
    pinn_source,
    smooth_disc,
)
from .train import mse_on_grid, train_experiments

__version__ = "0.1.0"

__all__ = [
    "ExperimentSpec",
    "ARCHITECTURES",
    "ACTIVATIONS",
    "build_mlp",
    "model_for",
    "export_weights",
    "import_weights",
    "UnsupportedLayer",
    "reference_norm",
    "reference_residual",
    "train_experiments",
    "mse_on_grid",
    "gaussian_peak",
    "smooth_disc",
    "pinn_solution",
    "pinn_source",
    "GAUSSIAN_DOMAIN",
    "DISC_DOMAIN",
    "PINN_DOMAIN",
    "__version__",
]
