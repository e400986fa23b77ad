"""Brute-force references that share no code with the library's algorithms."""

import itertools
import math
import random
from fractions import Fraction
from functools import lru_cache

from probcorr.prob_core import Distribution


def hall_oracle(related, left, right) -> bool:
    """Every set of left points must fit into the mass of its related right points."""
    lefts = list(left)
    for size in range(1, len(lefts) + 1):
        for subset in itertools.combinations(lefts, size):
            mass = sum(left[a] for a in subset)
            reachable = {b for b in right for a in subset if (a, b) in related}
            if mass > sum((right[b] for b in reachable), Fraction(0)):
                return False
    return True


def common_denominator(*dists) -> int:
    out = 1
    for dist in dists:
        for weight in dist.values():
            out = out * weight.denominator // math.gcd(out, weight.denominator)
    return out


def decomposition_oracle(related, left, right):
    """Search index decompositions with unit weight ``1/L``.

    Both distributions are split into ``L`` equal slices, with ``L`` the
    common denominator, and every left slice is paired with a related right
    slice. Returns the pair weights of one decomposition, or None.
    """
    unit = common_denominator(left, right)
    lefts = list(left)
    rights = list(right)
    supply = [int(left[a] * unit) for a in lefts]
    demand = tuple(int(right[b] * unit) for b in rights)
    options = [[j for j, b in enumerate(rights) if (a, b) in related] for a in lefts]

    def splits(count, bins, capacity):
        if not bins:
            if count == 0:
                yield ()
            return
        first, rest = bins[0], bins[1:]
        for take in range(min(count, capacity[first]), -1, -1):
            for tail in splits(count - take, rest, capacity):
                yield ((first, take),) + tail

    @lru_cache(maxsize=None)
    def solve(i, remaining):
        if i == len(lefts):
            return () if not any(remaining) else None
        for split in splits(supply[i], options[i], remaining):
            rest = list(remaining)
            for j, take in split:
                rest[j] -= take
            tail = solve(i + 1, tuple(rest))
            if tail is not None:
                return tuple((i, j, take) for j, take in split if take) + tail
        return None

    found = solve(0, demand)
    if found is None:
        return None
    weights = {}
    for i, j, take in found:
        key = (lefts[i], rights[j])
        weights[key] = weights.get(key, Fraction(0)) + Fraction(take, unit)
    return weights


def random_distribution(rng: random.Random, points, denominator: int) -> Distribution:
    """Weights ``k/denominator`` spread over a random subset of ``points``."""
    size = rng.randint(1, min(len(points), denominator))
    chosen = rng.sample(list(points), size)
    cuts = sorted(rng.sample(range(1, denominator), size - 1))
    bounds = [0] + cuts + [denominator]
    return Distribution({p: Fraction(hi - lo, denominator)
                         for p, hi, lo in zip(chosen, bounds[1:], bounds)})


def random_relation(rng: random.Random, lefts, rights, density: float) -> set:
    return {(a, b) for a in lefts for b in rights if rng.random() < density}


def transitive_closure(pairs, universe) -> set:
    closed = set(pairs) | {(x, x) for x in universe}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(closed), repeat=2):
            if b == c and (a, d) not in closed:
                closed.add((a, d))
                changed = True
    return closed


def push_along(rng: random.Random, dist: Distribution, related: set) -> Distribution:
    """Move each point's mass onto related points, splitting it at random."""
    parts = []
    for point, weight in dist.items():
        targets = sorted(b for a, b in related if a == point)
        picked = rng.sample(targets, rng.randint(1, min(2, len(targets))))
        if len(picked) == 1:
            parts.append((picked[0], weight))
        else:
            share = weight * Fraction(rng.randint(1, 3), 4)
            parts.extend([(picked[0], share), (picked[1], weight - share)])
    return Distribution(parts)
