"""Ranked mass states and the operations that evolve them.

A state is a finite non-increasing tuple of strictly positive fragment
masses, a dust ledger for mass that left the resolved fragments, and the
nominal budget the state started from. All operations preserve the budget
inequality sum(parts) + dust <= nominal (within a small float tolerance)
and keep the parts ranked.
"""

from dataclasses import dataclass

from .errors import (
    InvalidFragmentVector,
    MassBudgetExceeded,
    NegativeMass,
    RankOutOfRange,
    ScaleOutOfRange,
)

# Absolute slack for budget checks; conservation itself is exact float
# arithmetic and stays far inside this.
BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class MassState:
    parts: tuple   # non-increasing, strictly positive
    dust: float    # mass lost to unresolved fragments, erosion, and flooring
    nominal: float # initial total mass


def from_masses(masses, dust=0.0, nominal=1.0):
    """Validating constructor. Zero masses are stripped, ties keep input order."""
    masses = [float(m) for m in masses]
    for m in masses:
        if m < 0.0:
            raise NegativeMass(f"fragment mass {m} is negative")
    if dust < 0.0:
        raise NegativeMass(f"dust {dust} is negative")
    if nominal <= 0.0:
        raise NegativeMass(f"nominal budget {nominal} must be positive")
    if sum(masses) + dust > nominal + BUDGET_TOL:
        raise MassBudgetExceeded(
            f"parts+dust = {sum(masses) + dust} exceeds nominal {nominal}")
    kept = [m for m in masses if m > 0.0]
    kept.sort(reverse=True)  # stable: equal masses keep input order
    return MassState(tuple(kept), float(dust), float(nominal))


def scale(state, factor):
    """Multiply every part, the dust, and the nominal budget by factor in [0, 1]."""
    if not 0.0 <= factor <= 1.0:
        raise ScaleOutOfRange(f"scale factor {factor} outside [0, 1]")
    if factor == 0.0:
        return MassState((), 0.0, 0.0)
    return MassState(tuple(m * factor for m in state.parts),
                     state.dust * factor, state.nominal * factor)


def validate_fragments(fragments):
    """Check a dislocation vector: non-negative, non-increasing, sum <= 1.

    Returns the vector with zero entries stripped.
    """
    prev = None
    total = 0.0
    for x in fragments:
        if x < 0.0:
            raise InvalidFragmentVector(f"fragment ratio {x} is negative")
        if prev is not None and x > prev:
            raise InvalidFragmentVector("fragment vector is not non-increasing")
        prev = x
        total += x
    if total > 1.0 + BUDGET_TOL:
        raise InvalidFragmentVector(f"fragment ratios sum to {total} > 1")
    return tuple(x for x in fragments if x > 0.0)


def dislocate(state, rank, fragments, mass_floor=0.0):
    """Replace the rank-th largest part (1-based) by its pieces and re-rank.

    The dislocated mass m becomes m*x for each ratio x in fragments; the
    deficit m*(1 - sum(fragments)) joins the dust, as does any piece below
    mass_floor. Ties in the re-ranking keep earlier-created fragments first.
    """
    if not 1 <= rank <= len(state.parts):
        raise RankOutOfRange(f"rank {rank} not in 1..{len(state.parts)}")
    fragments = validate_fragments(fragments)
    parent = state.parts[rank - 1]
    dust = state.dust
    deficit = 1.0 - sum(fragments)
    if deficit > 0.0:
        dust += parent * deficit
    survivors = list(state.parts[:rank - 1] + state.parts[rank:])
    for x in fragments:
        piece = parent * x
        if piece < mass_floor or piece == 0.0:
            dust += piece
        else:
            survivors.append(piece)
    survivors.sort(reverse=True)  # stable: pre-existing fragments precede new ones on ties
    return MassState(tuple(survivors), dust, state.nominal)


def uniform_dist(a, b):
    """Sup over ranks of |a_k - b_k|, reading missing ranks as zero."""
    d = 0.0
    for i in range(max(len(a.parts), len(b.parts))):
        x = a.parts[i] if i < len(a.parts) else 0.0
        y = b.parts[i] if i < len(b.parts) else 0.0
        d = max(d, abs(x - y))
    return d


def prefix_mass(state, k):
    """Sum of the k largest parts (all parts when fewer than k exist)."""
    if k < 1:
        raise RankOutOfRange(f"prefix length {k} must be >= 1")
    return sum(state.parts[:k])
