"""Time-series toolkit for comparing monthly trademark and patent filings."""

from __future__ import annotations

__version__ = "0.1.0"
