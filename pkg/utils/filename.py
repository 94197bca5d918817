"""
Utilities for naming solver output files.

Every artifact is named after the environment title, the source frequency
and the artifact kind:

    <sanitized-title>-<freq>hz-<kind>.<ext>

Example: the "Example 4 | attenuating bottom" environment at 20 Hz writes
its wavenumber table to "Example-4-attenuating-bottom-20hz-wavenumbers.csv".
"""

from __future__ import annotations

import re
import unicodedata

# Artifact kind -> file extension.
OUTPUT_KINDS: dict[str, str] = {
    "wavenumbers": "csv",
    "modes": "csv",
    "tl": "csv",
    "tl-image": "pgm",
    "converge": "csv",
}

# Characters illegal in filenames on Windows; also strip ASCII control chars.
_INVALID_CHARS = re.compile(r'[\\/:*?"<>|\x00-\x1f]')
# Whitespace, hyphens, underscores in a row collapse to a single hyphen.
_MULTI_SEP = re.compile(r"[\s\-_]+")


def sanitize_filename(name: str, max_length: int = 80) -> str:
    """Return a string safe to use as a filename on Windows / macOS / Linux.

    - NFKC-normalize (folds fullwidth characters, etc.)
    - Replace illegal characters with "-"
    - Collapse runs of whitespace / hyphens / underscores
    - Strip leading/trailing separators
    - Truncate to max_length
    """
    if not name:
        return ""
    cleaned = unicodedata.normalize("NFKC", name)
    cleaned = _INVALID_CHARS.sub("-", cleaned)
    cleaned = _MULTI_SEP.sub("-", cleaned)
    cleaned = cleaned.strip("-").strip()
    if len(cleaned) > max_length:
        cleaned = cleaned[:max_length].rstrip("-")
    return cleaned


def frequency_tag(freq_hz: float) -> str:
    """20.0 -> "20hz", 12.5 -> "12p5hz" (no dots inside the stem)."""
    text = f"{freq_hz:g}".replace(".", "p").replace("+", "")
    return f"{text}hz"


def build_output_filename(title: str, freq_hz: float, kind: str) -> str:
    """Compose an artifact filename; an empty title falls back to "env"."""
    if kind not in OUTPUT_KINDS:
        raise ValueError(f"unknown output kind '{kind}'")
    base = sanitize_filename(title) or "env"
    return f"{base}-{frequency_tag(freq_hz)}-{kind}.{OUTPUT_KINDS[kind]}"
