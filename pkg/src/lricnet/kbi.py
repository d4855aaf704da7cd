"""Short-range key borrower index.

For a single lender, every borrower is scored by the critical groups in
which it is pivotal: each such group contributes the borrower's direct loan
share, reinforced by co-members that also lend to the borrower (capped at
their own loan from the lender), averaged over the group size.  Scores are
normalized per lender and aggregated across lenders by lending volume.
"""

from __future__ import annotations

from .groups import critical_groups
from .network import ExposureNetwork, ThresholdPolicy, out_strength


def direct_intensity(net: ExposureNetwork, lender: str) -> dict[str, float]:
    """Loan shares p_i = a_Li / out-strength(L) over the lender's borrowers."""
    total = out_strength(net, lender)
    if total == 0:
        raise ValueError(f"{lender!r} has no outgoing exposure")
    return {b: net.weight(lender, b) / total for b in net.borrowers_of(lender)}


def indirect_intensity(net: ExposureNetwork, lender: str, via: str, borrower: str) -> float:
    """Intensity reaching `borrower` through co-borrower `via`.

    The channel exists only when the lender lends to `via` and `via` lends
    to `borrower`.  Its intensity is the via->borrower loan, capped at the
    lender's own loan to `via`, scaled by the lender's total lending.  Zero
    when via == borrower.
    """
    if via == borrower:
        return 0.0
    total = out_strength(net, lender)
    via_loan = net.weight(lender, via)
    if total == 0 or via_loan == 0:
        return 0.0
    chained = net.weight(via, borrower)
    if chained == 0:
        return 0.0
    return min(chained, via_loan) / total


def kbi_for_lender(
    net: ExposureNetwork, lender: str, policy: ThresholdPolicy
) -> dict[str, float]:
    """Normalized pivotality scores of the lender's direct borrowers.

    alpha_i = sum over critical groups G with i pivotal of
        (p_i + sum_{j in G, j != i} min(a_ji, a_Lj) / s_L) / |G|
    normalized to sum 1; all-zero when the lender has no critical group.
    """
    total = out_strength(net, lender)
    if total == 0:
        raise ValueError(f"{lender!r} has no outgoing exposure")
    borrowers = net.borrowers_of(lender)
    alpha = {b: 0.0 for b in borrowers}
    for group in critical_groups(net, lender, policy):
        for member in group.pivotal:
            reinforcement = sum(
                min(net.weight(j, member), net.weight(lender, j))
                for j in group.members
                if j != member
            )
            alpha[member] += (
                (net.weight(lender, member) + reinforcement) / total
            ) / len(group.members)
    mass = sum(alpha.values())
    if mass == 0:
        return alpha
    return {b: v / mass for b, v in alpha.items()}


def kbi(net: ExposureNetwork, policy: ThresholdPolicy) -> dict[str, float]:
    """Aggregate index over all lenders, weighted by lending volume."""
    strengths = {v: out_strength(net, v) for v in net.nodes}
    grand_total = sum(strengths.values())
    scores = {v: 0.0 for v in net.nodes}
    if grand_total == 0:
        return scores
    for lender, strength in strengths.items():
        if strength == 0:
            continue
        weight = strength / grand_total
        for borrower, value in kbi_for_lender(net, lender, policy).items():
            scores[borrower] += weight * value
    return scores
