"""Region files (JSON) and SVG pictures for dimensions 1 and 2."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ValidationError
from .region import Region


def load_region(path: str | Path) -> Region:
    with open(path) as fh:
        return Region.from_json(json.load(fh))


def save_region(region: Region, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(region.to_json(), fh, indent=1)
        fh.write("\n")


def to_svg(region: Region, size: int = 400, margin: int = 10, fill: str = "#4a7ab5") -> str:
    """Render a 1-D or 2-D region; 1-D intervals are drawn as bars."""
    if region.dim not in (1, 2):
        raise ValidationError("SVG rendering supports dimensions 1 and 2")
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size if region.dim == 2 else 60}">'
    if region.is_null():
        return head + "</svg>\n"
    lo, hi = region.bounding_box()
    span = max(float(h - l) for l, h in zip(lo, hi)) or 1.0
    scale = (size - 2 * margin) / span
    parts = [head]
    if region.dim == 1:
        for p in region.pieces:
            x = margin + (float(p.lo[0] - lo[0])) * scale
            w = float(p.hi[0] - p.lo[0]) * scale
            parts.append(f'<rect x="{x:.3f}" y="20" width="{w:.3f}" height="20" fill="{fill}"/>')
    else:
        for p in region.pieces:
            pts = " ".join(
                f"{margin + float(x - lo[0]) * scale:.3f},{size - margin - float(y - lo[1]) * scale:.3f}" for x, y in p
            )
            parts.append(f'<polygon points="{pts}" fill="{fill}" stroke="none"/>')
    parts.append("</svg>\n")
    return "\n".join(parts)
