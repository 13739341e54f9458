"""Diederich-Fornaess index toolkit."""

import json

from ._core import (
    DfindexError,
    estimate,
    git_blob_sha1,
    levi_at,
    periods,
    sigma_summary,
    signed_distance,
    zoo_ids,
)
from . import _core

__all__ = [
    "DfindexError",
    "estimate",
    "git_blob_sha1",
    "levi_at",
    "periods",
    "run",
    "sigma_summary",
    "signed_distance",
    "zoo_ids",
]


def run(*args):
    """Run a CLI command in-process; returns (exit_code, report dict)."""
    code, text = _core.cli([str(a) for a in args])
    return code, json.loads(text)
