"""Shared numerical settings."""

import os

DEFAULT_EPS = 1e-6

# Denominator floor below which a fault loop is declared unenergized.
I_MIN = 1e-9

# Condition-number level at which linear systems are flagged as near-singular.
COND_WARN = 1e12


def eps() -> float:
    """Clamp distance for the normalized fault location.

    Fault locations are restricted to [eps, 1-eps] because the endpoints put
    the fault bus on top of a terminal bus and break the two-segment split.
    Override with the INCRRELAY_EPS environment variable.
    """
    return float(os.environ.get("INCRRELAY_EPS", DEFAULT_EPS))


def clamp_location(m_t: float) -> float:
    """Clamp a normalized fault location into [eps, 1-eps]."""
    e = eps()
    return min(max(m_t, e), 1.0 - e)
