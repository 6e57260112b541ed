"""Frozen calibration constants.

The paper-style bounds checked by some experiments hold up to unspecified
absolute constants; ``displab calibrate`` measures them on a pilot suite
and freezes half the minimum observed ratio into the packaged
``constants.json``, which this module loads. Regenerate with
``displab calibrate --out src/displab/data/constants.json``.
"""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

__all__ = ["load_constants"]

_KEYS = ("expectation_volume_c", "leaf_variance_c", "uniform_part_c0")


@lru_cache(maxsize=1)
def load_constants() -> dict:
    ref = resources.files("displab.data").joinpath("constants.json")
    with ref.open("r", encoding="utf-8") as fh:
        data = json.load(fh)
    missing = [k for k in _KEYS if k not in data]
    if missing:
        raise KeyError(f"constants.json is missing {missing}; rerun 'displab calibrate'")
    return data
