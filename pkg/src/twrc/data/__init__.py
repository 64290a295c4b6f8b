"""Bundled channel documents."""

from importlib import resources

from ..channel import TwrcSpec, parse_spec

BUNDLED = ("paper_sec5", "noiseless_adder", "paper_sec5_template")


def bundled_channel_path(name: str):
    """Filesystem path of a bundled channel document (name without .json)."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled channel named {name!r}; "
                       f"available: {', '.join(BUNDLED)}")
    return resources.files(__package__).joinpath(f"{name}.json")


def load_bundled(name: str) -> TwrcSpec:
    return parse_spec(bundled_channel_path(name).read_text(encoding="utf-8"))
