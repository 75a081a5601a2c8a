"""Metadata headers written at the top of every output file."""
from __future__ import annotations

import json
from typing import Any, Iterable, Iterator, TextIO

from . import FORMAT_VERSION, __version__

RNG_ALGORITHM = "numpy.PCG64"


def header_lines(seed: int | None = None, params: dict[str, Any] | None = None) -> list[str]:
    meta = {"tool": "scholnet", "version": __version__, "format": FORMAT_VERSION}
    lines = [f"# {json.dumps(meta, sort_keys=True)}"]
    if seed is not None:
        lines.append(f"# seed={seed} rng={RNG_ALGORITHM}")
    if params:
        lines.append(f"# params={json.dumps(params, sort_keys=True, default=str)}")
    return lines


def write_header(fh: TextIO, seed: int | None = None, params: dict[str, Any] | None = None) -> None:
    for line in header_lines(seed, params):
        fh.write(line + "\n")


def meta_record(seed: int | None = None, params: dict[str, Any] | None = None) -> dict[str, Any]:
    """Same content as the comment header, for JSON outputs."""
    rec: dict[str, Any] = {"tool": "scholnet", "version": __version__, "format": FORMAT_VERSION}
    if seed is not None:
        rec["seed"] = seed
        rec["rng"] = RNG_ALGORITHM
    if params:
        rec["params"] = params
    return rec


def strip_comments(lines: Iterable[str]) -> Iterator[str]:
    for line in lines:
        if not line.startswith("#"):
            yield line


def read_header_params(path) -> dict[str, Any]:
    """Recover the ``params`` block of a commented header, if any."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if line.startswith("# params="):
                return json.loads(line[len("# params="):])
    return {}
