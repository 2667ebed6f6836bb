"""Machines shipped with the package and the inputs each is tested on."""

from __future__ import annotations

from functools import cache
from importlib import resources
from pathlib import Path

from memtm import utm
from memtm.machine import MachineSpec, load_machine, parse_machine

# programs run on the universal machine, with the left padding they need
UTM_PROGRAMS = {"bb2": 4, "halter": 1}


@cache
def machine(name: str) -> MachineSpec:
    text = resources.files("memtm").joinpath("machines", f"{name}.tm").read_text(encoding="utf-8")
    return parse_machine(text, name=name)


def names() -> list[str]:
    return sorted(
        Path(p.name).stem
        for p in resources.files("memtm").joinpath("machines").iterdir()
        if p.name.endswith(".tm")
    )


def resolve(path_or_name: str) -> MachineSpec:
    """Load a ``.tm`` file, falling back to a corpus machine of that name."""
    p = Path(path_or_name)
    if p.is_file():
        return load_machine(p)
    stem = p.stem if p.suffix == ".tm" else p.name
    if p.parent == Path(".") and stem in names():
        return machine(stem)
    raise FileNotFoundError(f"no machine file or corpus machine {path_or_name!r}")


def utm_input(program: str) -> str:
    return utm.encode(machine(program), "", pad=UTM_PROGRAMS[program]).tape


def inputs() -> dict[str, list[str]]:
    """Every corpus machine with its shipped test inputs."""
    return {
        "halter": [""],
        "successor": ["", "0", "1", "011", "111", "1011", "10011"],
        "palindrome": ["", "0", "1", "00", "01", "0110", "0101", "10101", "10110", "100"],
        "bb2": [""],
        "bb3": [""],
        "bb3_sigma": [""],
        "revisit": [""],
        "utm": [utm_input(p) for p in UTM_PROGRAMS],
    }
