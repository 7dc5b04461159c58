"""Bundled GIL programs: specified heap procedures and callers that use them."""

from importlib import resources


def text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text()


def specs_source() -> str:
    return text("heap_specs.gil")


def callers_source() -> str:
    """Specified procedures together with the callers that use them."""
    return specs_source() + "\n" + text("callers.gil")
