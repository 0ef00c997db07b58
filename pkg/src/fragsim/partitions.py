"""Exchangeable partitions of a finite label set.

Partitions are stored canonically: each block ascending, blocks ordered by
least element. The ground set is kept explicit (a sorted tuple of integer
labels) so that restriction can retain original labels and composition can
check that refinements cover exactly the blocks they refine.

Sampling follows the paintbox rule: every label independently picks
fragment k with probability equal to that fragment's share of the nominal
budget, and falls into dust with the remaining probability; dust labels
are unique to their element, so each becomes a singleton.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyRestriction, NotAPermutation, RefinementMismatch
from .ranked_state import from_masses


@dataclass(frozen=True)
class FinitePartition:
    ground: tuple  # sorted distinct integer labels
    blocks: tuple  # disjoint tuples covering ground, ordered by least element

    @property
    def n(self):
        return len(self.ground)


def from_blocks(blocks, ground=None):
    """Validating constructor; canonicalizes block and element order."""
    cleaned = [tuple(sorted(b)) for b in blocks]
    if any(not b for b in cleaned):
        raise ValueError("empty block")
    cleaned.sort(key=lambda b: b[0])
    seen = set()
    for b in cleaned:
        if seen.intersection(b):
            raise ValueError("blocks are not disjoint")
        seen.update(b)
    if ground is None:
        ground = tuple(sorted(seen))
    else:
        ground = tuple(sorted(ground))
        if set(ground) != seen:
            raise ValueError("blocks do not cover the ground set")
    return FinitePartition(ground, tuple(cleaned))


def from_labels(elements, labels):
    """Partition grouping elements by equal labels."""
    groups = {}
    for e, lab in zip(elements, labels):
        groups.setdefault(lab, []).append(e)
    return from_blocks(groups.values(), elements)


def trivial(n):
    """The one-block partition of {1..n}."""
    return from_blocks([range(1, n + 1)])


def _paint_labels(state, count, rng):
    """Independent paintbox labels for count elements; -1 marks dust."""
    shares = np.asarray(state.parts, dtype=float) / state.nominal
    cum = np.cumsum(shares)
    u = rng.random(count)
    idx = np.searchsorted(cum, u, side="right")
    return np.where(idx < len(shares), idx, -1)


def _paint_over(state, elements, rng):
    labels = _paint_labels(state, len(elements), rng)
    # Dust elements get a label no fragment can produce: their own position.
    keys = [int(lab) if lab >= 0 else -(pos + 1)
            for pos, lab in enumerate(labels)]
    return from_labels(elements, keys)


def paintbox(s, n, rng):
    """Paintbox partition of {1..n} driven by the ranked state s."""
    return _paint_over(s, tuple(range(1, n + 1)), rng)


def frequencies(p):
    """Ranked block frequencies |B|/n as a mass state (no dust at finite n)."""
    return from_masses([len(b) / p.n for b in p.blocks])


def induced(p, subset):
    """Restriction of p to subset, keeping original labels."""
    subset = set(subset)
    if not subset:
        raise EmptyRestriction("cannot restrict to the empty set")
    if not subset.issubset(p.ground):
        raise ValueError("subset is not contained in the ground set")
    blocks = [cut for b in p.blocks if (cut := subset.intersection(b))]
    return from_blocks(blocks, subset)


def compose(p, refinements):
    """Replace each block of p by the blocks of its refinement.

    refinements[i] must partition exactly p.blocks[i]; the result refines p.
    """
    if len(refinements) != len(p.blocks):
        raise RefinementMismatch(
            f"{len(refinements)} refinements for {len(p.blocks)} blocks")
    merged = []
    for block, ref in zip(p.blocks, refinements):
        if ref.ground != block:
            raise RefinementMismatch(
                f"refinement ground {ref.ground} is not the block {block}")
        merged.extend(ref.blocks)
    return from_blocks(merged, p.ground)


def apply_permutation(p, sigma):
    """Partition whose element pairs relate iff their sigma images relate in p.

    sigma is positional over the ground set: sigma[k] is the image of
    p.ground[k]. Blocks of the result are sigma-preimages of blocks of p.
    """
    sigma = tuple(sigma)
    if len(sigma) != p.n or set(sigma) != set(p.ground):
        raise NotAPermutation(f"{sigma} is not a bijection of {p.ground}")
    inverse = {image: source for source, image in zip(p.ground, sigma)}
    return from_blocks([[inverse[e] for e in b] for b in p.blocks], p.ground)


def partition_step(p, duration, kernel, rng):
    """One fragmentation transition applied blockwise to p.

    Each block's mass is estimated by its frequency |B|/n, evolved through
    the kernel for the duration, and the resulting relative masses drive a
    paintbox over the block's elements. Blocks consume the rng stream in
    canonical order, which makes the draw reproducible.
    """
    if duration == 0.0:
        return p
    refinements = []
    for block in p.blocks:
        rel = kernel(len(block) / p.n, duration, rng)
        refinements.append(_paint_over(rel, block, rng))
    return compose(p, refinements)
