"""Loading of surrogates from the built-in registry and entry points."""

from collections.abc import Mapping
from importlib.metadata import entry_points
from typing import Any

from therapy_saga.surrogates.gp.manifest import gp_manifest
from therapy_saga.surrogates.manifest import SurrogateManifest
from therapy_saga.surrogates.mlp.manifest import mlp_manifest

ENTRY_POINT_GROUP = "therapy_saga.surrogates"

BUILTIN_SURROGATES: Mapping[str, SurrogateManifest[Any, Any]] = {
    gp_manifest.key: gp_manifest,
    mlp_manifest.key: mlp_manifest,
}


class SurrogateNotFoundError(Exception):
    """Raised when a surrogate is not found."""


def load_surrogate_manifest(key: str) -> SurrogateManifest[Any, Any]:
    """Load a surrogate manifest by key.

    Built-in surrogates resolve without package metadata, so an uninstalled
    source checkout still finds them. Other keys are looked up in the
    ``therapy_saga.surrogates`` entry-point group.

    Args:
        key: The surrogate key (e.g., "gp", "mlp")

    Returns:
        The surrogate manifest instance

    Raises:
        SurrogateNotFoundError: If no surrogate with the given key is found

    """
    if key in BUILTIN_SURROGATES:
        return BUILTIN_SURROGATES[key]

    entries = entry_points(group=ENTRY_POINT_GROUP)
    for entry in entries:
        if entry.name == key:
            manifest: SurrogateManifest[Any, Any] = entry.load()
            return manifest

    available = sorted({*BUILTIN_SURROGATES, *(e.name for e in entries)})
    raise SurrogateNotFoundError(
        f"Surrogate '{key}' not found. Available surrogates: {available}"
    )
