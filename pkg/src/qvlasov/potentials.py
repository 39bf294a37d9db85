"""Named potential presets, expressed as strings for the expression parser."""

from __future__ import annotations

from .parser import parse_potential
from .ring import RingElem

PRESETS = {
    # double-well quartic with broken symmetry
    "goldstone": "-q^2/2 + q^4/4",
    # purely growing quartic, single stable point at q = 0
    "quartic": "q^4/4",
    "harmonic": "q^2/2",
}


def modulated_harmonic(a: str = "1/2") -> str:
    """Harmonic confinement with a cosine ripple of relative amplitude a."""
    return f"q^2/2*(1 + {a}*cos(2*pi*q))"


def resolve_potential(text: str) -> RingElem:
    """Parse a potential expression, accepting preset names as shorthands.

    "modulated" and "modulated:a=<rational>" expand to the rippled harmonic
    potential; other preset names are looked up directly.
    """
    text = text.strip()
    if text in PRESETS:
        return parse_potential(PRESETS[text])
    if text == "modulated":
        return parse_potential(modulated_harmonic())
    if text.startswith("modulated:a="):
        return parse_potential(modulated_harmonic(text.split("=", 1)[1]))
    return parse_potential(text)
