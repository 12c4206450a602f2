"""Tissue label codes shared by every module and file format."""

from __future__ import annotations

from enum import IntEnum


class Tissue(IntEnum):
    BACKGROUND = 0
    SKULL = 1
    CSF = 2
    GRAY_MATTER = 3
    WHITE_MATTER = 4


TISSUES = tuple(Tissue)

TISSUE_NAMES = {
    Tissue.BACKGROUND: "background",
    Tissue.SKULL: "skull",
    Tissue.CSF: "csf",
    Tissue.GRAY_MATTER: "gray_matter",
    Tissue.WHITE_MATTER: "white_matter",
}

TISSUE_BY_NAME = {name: tissue for tissue, name in TISSUE_NAMES.items()}

# Fixed color for each tissue in overlay PNGs (RGB).
OVERLAY_PALETTE = {
    Tissue.BACKGROUND: (0, 0, 0),
    Tissue.SKULL: (255, 255, 0),
    Tissue.CSF: (0, 0, 255),
    Tissue.GRAY_MATTER: (128, 128, 128),
    Tissue.WHITE_MATTER: (255, 255, 255),
}
