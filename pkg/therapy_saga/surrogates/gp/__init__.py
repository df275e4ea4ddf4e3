"""Gaussian-process surrogate module."""

from therapy_saga.surrogates.gp.config import GpOptions
from therapy_saga.surrogates.gp.manifest import gp_manifest
from therapy_saga.surrogates.gp.model import GpModel, gp_fit, gp_predict

__all__ = ["GpModel", "GpOptions", "gp_fit", "gp_manifest", "gp_predict"]
