"""Multilayer-perceptron surrogate module."""

from therapy_saga.surrogates.mlp.config import MlpOptions
from therapy_saga.surrogates.mlp.manifest import mlp_manifest
from therapy_saga.surrogates.mlp.model import MlpModel, mlp_fit, mlp_predict

__all__ = ["MlpModel", "MlpOptions", "mlp_fit", "mlp_manifest", "mlp_predict"]
