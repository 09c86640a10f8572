"""Built-in scenarios doubling as regression fixtures.

Each gallery entry is a scenario file shipped with the package plus a
frozen expected report.  Running an entry executes the full command suite
(validate, report, eval, singular, orbit) with fixed options and compares
the serialized bytes against the stored expectation; regeneration requires
an explicit flag.
"""

from __future__ import annotations

import json
from importlib import resources

from .runner import run_command, to_json
from .scenario import Scenario, loads

__all__ = ["GALLERY", "gallery_names", "load_gallery", "run_gallery_entry", "GalleryMismatch"]

GALLERY = ("dbl", "cuntz2", "z2_point", "i2", "pair2", "pair3", "pair4")

_OPTS = {
    "dbl": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
    "cuntz2": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
    "z2_point": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
    "i2": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
    "pair2": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
    "pair3": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
    "pair4": {"bound": 2, "depth": 2, "length": 2, "tol": 1e-9},
}

_COMMANDS = ("validate", "report", "eval", "singular", "orbit")


class GalleryMismatch(AssertionError):
    """A gallery run differed from its frozen expected output."""


def gallery_names() -> tuple[str, ...]:
    return GALLERY


def _data_text(relative: str) -> str:
    return resources.files("etale_lab").joinpath("data", relative).read_text(encoding="utf-8")


def load_gallery(name: str) -> Scenario:
    if name not in GALLERY:
        raise KeyError(f"unknown gallery scenario {name!r}; have {', '.join(GALLERY)}")
    return loads(_data_text(f"{name}.json"))


def run_gallery_entry(name: str, check: bool = True) -> tuple[dict, str]:
    """Run the full command suite; returns the consolidated report and its
    serialization.  With check=True the bytes are compared against the
    frozen fixture."""
    scn = load_gallery(name)
    opts = dict(_OPTS[name])
    consolidated = {"gallery": name, "runs": []}
    for command in _COMMANDS:
        consolidated["runs"].append(run_command(command, scn, opts))
    text = to_json(consolidated)
    if check:
        try:
            expected = _data_text(f"expected/{name}.json")
        except FileNotFoundError:
            raise GalleryMismatch(f"no frozen expectation for {name!r}; regenerate fixtures")
        if expected != text:
            raise GalleryMismatch(f"gallery output for {name!r} differs from the frozen fixture")
    return consolidated, text


def write_fixture(name: str, directory) -> str:
    """Regenerate the frozen expectation (explicit developer action)."""
    _, text = run_gallery_entry(name, check=False)
    path = directory / f"{name}.json"
    path.write_text(text, encoding="utf-8")
    return str(path)
