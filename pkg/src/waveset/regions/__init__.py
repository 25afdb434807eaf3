"""Exact region algebra and tiling checks."""

from .io import load_region, save_region, to_svg
from .region import OPS, Region, union_all
from .tiling import (
    DilationGenerator,
    DilationWindow,
    FundamentalDomain,
    TilingReport,
    d_map,
    dilation_check,
    dilation_generator,
    reduce_modulo,
    redundant_partition,
    tau_map,
    translation_check,
)


def volume(s: Region):
    return s.volume


def affine_image(s: Region, m, t=None) -> Region:
    return s.affine_image(m, t)


def boolean(s: Region, t: Region, op: str) -> Region:
    return s.boolean(t, op)


__all__ = [
    "OPS",
    "DilationGenerator",
    "DilationWindow",
    "FundamentalDomain",
    "Region",
    "TilingReport",
    "affine_image",
    "boolean",
    "d_map",
    "dilation_check",
    "dilation_generator",
    "load_region",
    "reduce_modulo",
    "redundant_partition",
    "save_region",
    "tau_map",
    "to_svg",
    "translation_check",
    "union_all",
    "volume",
]
