"""Comparison helpers with the tolerance policy used across the package.

Identities that hold exactly in exact arithmetic are checked to a
relative 1e-9 (with a tiny absolute floor for the all-zero case).
One-sided inequalities get an absolute slack of 1e-10 scaled by the
magnitude of the sides.  Randomized verification margins use a looser
1e-8 scale, widened to four standard errors under monte carlo plans.
"""

from __future__ import annotations

IDENTITY_REL = 1e-9
IDENTITY_FLOOR = 1e-12
INEQUALITY_SLACK = 1e-10
MARGIN_REL = 1e-8
MC_SE_FACTOR = 4.0


def rel_close(a: float, b: float, rel: float = IDENTITY_REL) -> bool:
    return abs(a - b) <= max(IDENTITY_FLOOR, rel * max(abs(a), abs(b)))


def le_with_slack(lhs: float, rhs: float, slack: float = INEQUALITY_SLACK) -> bool:
    return lhs <= rhs + slack * max(1.0, abs(lhs), abs(rhs))


def margin_tolerance(lhs: float, rhs: float, extra_se: float = 0.0) -> float:
    """Allowed negative excursion for a margin rhs - lhs."""
    return MARGIN_REL * max(1.0, abs(lhs), abs(rhs)) + MC_SE_FACTOR * extra_se
