"""Gaussian-process surrogate manifest."""

from therapy_saga.surrogates.gp.config import GpOptions
from therapy_saga.surrogates.gp.model import describe_gp, gp_fit, rate_gp
from therapy_saga.surrogates.manifest import SurrogateManifest

gp_manifest = SurrogateManifest(
    key="gp",
    options_cls=GpOptions,
    fit=gp_fit,
    rate=rate_gp,
    describe=describe_gp,
)
