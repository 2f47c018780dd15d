"""Elementary Schlesinger transformations of Fuchsian systems and discrete Painleve dynamics."""

from __future__ import annotations

__version__ = "0.1.0"
