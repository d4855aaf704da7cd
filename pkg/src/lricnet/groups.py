"""Critical groups of a lender's direct borrowers and their pivotal members.

A group of direct borrowers is *critical* when the loans its members took
from the lender add up to at least the lender's threshold q; a member is
*pivotal* in a critical group when removing it drops the total strictly
below q.  These two notions drive both the short-range index and the
path-based influence matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .network import ExposureNetwork, ThresholdPolicy, threshold

# Absolute tolerance for q comparisons.  Exact boundary cases occur in real
# inputs (a single loan equal to q), and must count as critical.
TOL = 1e-9

DEFAULT_ENUMERATION_CAP = 25


def _quota(net: ExposureNetwork, policy: ThresholdPolicy, lender: str) -> float | None:
    return threshold(net, policy, lender)


@dataclass(frozen=True)
class CriticalGroup:
    lender: str
    members: frozenset[str]
    total: float
    pivotal: frozenset[str]


def is_critical(
    net: ExposureNetwork,
    lender: str,
    group: frozenset[str] | set[str],
    policy: ThresholdPolicy,
) -> bool:
    """True when the group's total borrowing from `lender` reaches q."""
    q = _quota(net, policy, lender)
    if q is None:
        return False
    borrowers = set(net.borrowers_of(lender))
    for member in group:
        if member not in borrowers:
            raise ValueError(f"{member!r} is not a direct borrower of {lender!r}")
    total = sum(net.weight(lender, member) for member in group)
    return total >= q - TOL


def pivotal_members(
    net: ExposureNetwork,
    lender: str,
    group: frozenset[str] | set[str],
    policy: ThresholdPolicy,
) -> frozenset[str]:
    """Members whose removal makes the group non-critical.

    A member whose removal leaves the total exactly at q is not pivotal:
    the reduced group is still critical.
    """
    if not is_critical(net, lender, group, policy):
        raise ValueError(f"group {sorted(group)} is not critical for {lender!r}")
    q = _quota(net, policy, lender)
    assert q is not None
    total = sum(net.weight(lender, member) for member in group)
    return frozenset(
        member for member in group if total - net.weight(lender, member) < q - TOL
    )


def critical_groups(
    net: ExposureNetwork,
    lender: str,
    policy: ThresholdPolicy,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[CriticalGroup]:
    """All critical subsets of the lender's direct borrowers, with pivotal sets.

    Exhaustive over the 2^|N| subsets, so the borrower count is limited by
    `cap`; for lenders beyond the cap use the simulation index instead.
    """
    q = _quota(net, policy, lender)
    if q is None:
        return []
    borrowers = net.borrowers_of(lender)
    if len(borrowers) > cap:
        raise ValueError(
            f"lender {lender!r} has {len(borrowers)} borrowers; exhaustive "
            f"enumeration is capped at {cap} (raise the cap or use the "
            f"simulation index)"
        )
    weights = {b: net.weight(lender, b) for b in borrowers}
    groups: list[CriticalGroup] = []
    for size in range(1, len(borrowers) + 1):
        for combo in combinations(borrowers, size):
            total = sum(weights[b] for b in combo)
            if total < q - TOL:
                continue
            pivotal = frozenset(b for b in combo if total - weights[b] < q - TOL)
            groups.append(
                CriticalGroup(
                    lender=lender,
                    members=frozenset(combo),
                    total=total,
                    pivotal=pivotal,
                )
            )
    return groups


def minimal_pivotal_sum(
    net: ExposureNetwork,
    lender: str,
    borrower: str,
    policy: ThresholdPolicy,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float | None:
    """Smallest total over critical groups in which `borrower` is pivotal.

    None when the borrower is pivotal nowhere (then it exerts no direct
    influence on the lender).
    """
    if borrower not in net.borrowers_of(lender):
        raise ValueError(f"{borrower!r} is not a direct borrower of {lender!r}")
    best: float | None = None
    for group in critical_groups(net, lender, policy, cap=cap):
        if borrower in group.pivotal and (best is None or group.total < best):
            best = group.total
    return best
