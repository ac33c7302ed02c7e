"""Pigeonhole scale selection and window length choice.

Given the decreasing image norms of a chosen direction under an r-tuple
of translations, the pigeonhole step finds a multiplicative gap of
relative width theta^(1/r) in the sequence, and the window choice turns
that gap into a unit length L whose products L * norm_k separate into a
group bounded below by theta^(-1/(2r)) and a group bounded above by
theta^(1/(2r)).

When every input is an exact power of two the gap conditions are decided
in integer arithmetic over log2, so the selected pair (p, q) carries no
floating point uncertainty; otherwise float logs are used with a small
tolerance on the non-strict inequality only.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .geometry import DirectionSelection

__all__ = ["pigeonhole", "choose_window", "WindowChoice"]

_TOL = 1e-12


def _is_pow2(x):
    if x <= 0.0 or not math.isfinite(x):
        return False
    return math.frexp(x)[0] == 0.5


def _log2_exact(x):
    # valid only for exact powers of two
    return math.frexp(x)[1] - 1


def _pigeonhole_log(logs, log_theta, r, exact):
    """Core search over (p, q) in lexicographic order.

    logs[k] = log(beta_{k+1} / beta_1) <= 0, log_theta < 0.  In exact
    mode both are Fractions and comparisons are exact; in float mode the
    non-strict inequality gets an absolute tolerance.
    """
    for p in range(1, r):
        for q in range(0, r - 1):
            if exact:
                upper_ok = logs[p] < Fraction((q + 1) * log_theta, r)
                lower_ok = Fraction(q * log_theta, r) <= logs[p - 1]
            else:
                ub = (q + 1) / r * log_theta
                lb = q / r * log_theta
                upper_ok = logs[p] < ub
                lower_ok = lb <= logs[p - 1] + _TOL * max(
                    1.0, abs(lb), abs(logs[p - 1]))
            if upper_ok and lower_ok:
                return p, q
    return None


def pigeonhole(betas, theta):
    """Smallest lexicographic (p, q), 1-based p, 0-based q, with

        beta_{p+1} < beta_1 * theta^((q+1)/r)  and
        beta_1 * theta^(q/r) <= beta_p,

    for a decreasing sequence of nonnegative betas (beta_1 > 0) with
    beta_r <= beta_1 * theta and theta in (0, 1).  Such a pair always
    exists, with p in [1, r-1] and q in [0, r-2].
    """
    betas = [float(b) for b in betas]
    r = len(betas)
    theta = float(theta)
    if r < 2:
        raise ValueError("need at least two betas")
    if not (0.0 < theta < 1.0):
        raise ValueError("theta must lie strictly between 0 and 1")
    if betas[0] <= 0.0 or any(b < 0.0 for b in betas):
        raise ValueError("betas must be nonnegative with beta_1 > 0")
    for k in range(r - 1):
        if betas[k + 1] > betas[k] * (1.0 + _TOL):
            raise ValueError("betas must be sorted in decreasing order")
    if betas[-1] > betas[0] * theta * (1.0 + _TOL):
        raise ValueError("beta_r <= beta_1 * theta is required for the "
                         "gap to exist")

    if all(_is_pow2(b) for b in betas) and _is_pow2(theta):
        n0 = _log2_exact(betas[0])
        logs = [Fraction(_log2_exact(b) - n0) for b in betas]
        log_theta = _log2_exact(theta)
        hit = _pigeonhole_log(logs, log_theta, r, exact=True)
    else:
        l0 = math.log(betas[0])
        logs = [math.log(b) - l0 if b > 0.0 else -math.inf for b in betas]
        hit = _pigeonhole_log(logs, math.log(theta), r, exact=False)
    if hit is None:
        raise ArithmeticError("no admissible (p, q); inputs violate the "
                              "gap hypothesis beyond tolerance")
    return hit


@dataclass(frozen=True)
class WindowChoice:
    """Window length L for a direction selection.

    L = norm_1^(-1) * theta^(-(q + 1/2)/r).  checks maps a condition
    name to (lhs, rhs, ok):

      scale_cap        L * norm_1     <= theta^(-1)
      group_lower      L * norm_p     >= theta^(-1/(2r))
      group_upper      L * norm_{p+1} <  theta^(1/(2r))
    """
    r: int
    p: int
    q: int
    theta: float
    L: float
    log_L: float
    checks: dict


def choose_window(selection, theta):
    """Run the pigeonhole step on a direction selection and compute L.

    theta must lie in [1/M_r, 1); the default choice theta = 1/M_r makes
    the hypothesis beta_r <= beta_1 * theta an equality.  Degenerate
    selections (all image norms equal) admit no window.
    """
    if not isinstance(selection, DirectionSelection):
        raise TypeError("expected a DirectionSelection")
    if selection.degenerate:
        raise ValueError("degenerate selection: all image norms are equal, "
                         "no separating window exists")
    theta = float(theta)
    r = selection.r
    log_theta = math.log(theta) if theta > 0 else -math.inf
    if not (0.0 < theta < 1.0):
        raise ValueError("theta must lie strictly between 0 and 1")
    if log_theta < -selection.log_M - 1e-9 * max(1.0, selection.log_M):
        raise ValueError("theta below 1/M_r: the image norms cannot span "
                         "the required ratio")

    p, q = pigeonhole(selection.norms, theta)
    log_L = -selection.log_norms[0] - (q + 0.5) / r * log_theta
    tol = 1e-9

    lhs_cap = log_L + selection.log_norms[0]
    rhs_cap = -log_theta
    lhs_lo = log_L + selection.log_norms[p - 1]
    rhs_lo = -log_theta / (2 * r)
    lhs_hi = log_L + selection.log_norms[p]
    rhs_hi = log_theta / (2 * r)
    checks = {
        "scale_cap": (math.exp(lhs_cap), math.exp(rhs_cap),
                      lhs_cap <= rhs_cap + tol),
        "group_lower": (math.exp(lhs_lo), math.exp(rhs_lo),
                        lhs_lo >= rhs_lo - tol),
        "group_upper": (math.exp(lhs_hi), math.exp(rhs_hi),
                        lhs_hi < rhs_hi + tol),
    }
    return WindowChoice(r=r, p=p, q=q, theta=theta, L=math.exp(log_L),
                        log_L=log_L, checks=checks)
