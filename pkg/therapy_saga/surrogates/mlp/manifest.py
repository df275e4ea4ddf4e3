"""MLP surrogate manifest."""

from therapy_saga.surrogates.manifest import SurrogateManifest
from therapy_saga.surrogates.mlp.config import MlpOptions
from therapy_saga.surrogates.mlp.model import describe_mlp, mlp_fit, rate_mlp

mlp_manifest = SurrogateManifest(
    key="mlp",
    options_cls=MlpOptions,
    fit=mlp_fit,
    rate=rate_mlp,
    describe=describe_mlp,
)
