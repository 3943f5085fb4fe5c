"""Adaptive unateness tester and its subroutines.

Every randomized routine takes an explicit :class:`~unate.rng.Rng`. Rejections
always carry a witness that can be re-checked against the oracle with 2 or 4
queries via :func:`verify_witness`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .boolfn import (
    UP,
    ContractError,
    EdgeWitness,
    Oracle,
    Orientation,
    Restriction,
    full_mask,
    mask_of,
    members,
    restrict,
)
from .rng import Rng

DEFAULT_C = 0.01
MONO_CONSTANT = 5  # ln(100) rounded up: miss probability <= e^-5 < 0.01


def _exact(x) -> Fraction:
    # decimal literal, not the binary float: keeps ceil(2n/(c*eps)) exact
    return x if isinstance(x, Fraction) else Fraction(str(x))


def mono_sample_count(active_size: int, epsilon) -> int:
    """Edge samples for the monotonicity subroutine: ceil(5 * |active| / epsilon)."""
    if active_size == 0:
        return 0
    return math.ceil(MONO_CONSTANT * active_size / _exact(epsilon))


def ceil_log2(n: int) -> int:
    return max(n - 1, 0).bit_length()


class Outcome(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass(frozen=True)
class DirectionViolation:
    """An influential edge whose orientation contradicts the expected one."""

    edge: EdgeWitness
    expected: Orientation

    def check(self, f: Oracle) -> bool:
        return self.edge.orientation is not self.expected and self.edge.recheck(f)

    def to_dict(self) -> dict:
        return {"kind": "direction_violation", "edge": self.edge.to_dict(),
                "expected": self.expected.value}


@dataclass(frozen=True)
class OrientationConflict:
    """Two influential edges on one coordinate with opposite orientations."""

    first: EdgeWitness
    second: EdgeWitness

    def check(self, f: Oracle) -> bool:
        a, b = self.first, self.second
        return (a.coordinate == b.coordinate and a.orientation is not b.orientation
                and a.recheck(f) and b.recheck(f))

    def to_dict(self) -> dict:
        return {"kind": "orientation_conflict", "first": self.first.to_dict(),
                "second": self.second.to_dict()}


Witness = DirectionViolation | OrientationConflict


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    witness: Witness | None = None

    def __post_init__(self):
        if (self.outcome is Outcome.REJECT) != (self.witness is not None):
            raise ContractError("a rejection needs a witness and an acceptance must not have one")

    @property
    def rejected(self) -> bool:
        return self.outcome is Outcome.REJECT

    def to_dict(self) -> dict:
        return {"outcome": self.outcome.value,
                "witness": None if self.witness is None else self.witness.to_dict()}


ACCEPT = Verdict(Outcome.ACCEPT)


def reject(witness: Witness) -> Verdict:
    return Verdict(Outcome.REJECT, witness)


def verify_witness(f: Oracle, verdict: Verdict) -> bool:
    """Re-query the witness points on ``f``. Acceptances have nothing to verify."""
    if not verdict.rejected:
        return True
    return verdict.witness.check(f)


@dataclass(frozen=True)
class TesterConfig:
    __test__ = False  # keep pytest from collecting it

    epsilon: float
    c: float = DEFAULT_C
    m: int | None = None
    mono_queries: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ContractError(f"epsilon={self.epsilon} must lie in (0, 1)")
        if not 0 < self.c < Fraction(1, 8):
            raise ContractError(f"c={self.c} must lie in (0, 1/8)")
        if self.m is not None and self.m < 0:
            raise ContractError("m must be non-negative")
        if self.mono_queries is not None and self.mono_queries < 0:
            raise ContractError("mono_queries must be non-negative")

    def iterations(self, n: int) -> int:
        if self.m is not None:
            return self.m
        return math.ceil(2 * n / (_exact(self.c) * _exact(self.epsilon)))

    def mono_samples(self, active_size: int) -> int:
        if self.mono_queries is not None:
            return self.mono_queries if active_size else 0
        return mono_sample_count(active_size, _exact(self.epsilon) / 2)

    def query_ceiling(self, n: int, active_size: int) -> int:
        """Closed-form bound on one run's total queries."""
        return 2 * self.iterations(n) * (ceil_log2(n) + 3) + 2 * self.mono_samples(active_size)


class Influence(NamedTuple):
    coordinate: int
    orientation: Orientation
    edge: EdgeWitness


def _lowest_bits(v: int, k: int) -> int:
    low = 0
    for _ in range(k):
        b = v & -v
        low |= b
        v ^= b
    return low


def _find(f: Oracle, n: int, tmask: int, rng: Rng) -> Influence | None:
    full = (1 << n) - 1
    if tmask == full:
        return None
    x = rng.bits(n)
    y = (x & tmask) | (rng.bits(n) & ~tmask & full)
    fx, fy = f(x), f(y)
    if fx == fy:
        return None
    v = x ^ y
    while v & (v - 1):
        # z agrees with y on the floor(|V|/2) smallest indices of V, with x elsewhere
        z = x ^ _lowest_bits(v, v.bit_count() >> 1)
        fz = f(z)
        if fz != fx:
            y, fy = z, fz
        else:
            x, fx = z, fz
        v = x ^ y
        assert fx != fy and not v & tmask
    edge = EdgeWitness.from_pair(x, fx, y, fy)
    return Influence(edge.coordinate, edge.orientation, edge)


def find_influential_coordinate(f: Oracle, T: Iterable[int], rng: Rng) -> Influence | None:
    """One run of the influential-coordinate search outside ``T``.

    Draws x uniformly and y equal to x on T and fresh elsewhere. If f(x) == f(y)
    returns None after 2 queries. Otherwise bisects the differing coordinates,
    one query per round, until x and y form an influential edge.
    """
    return _find(f, f.n, mask_of(T, f.n), rng)


@dataclass
class SearchPhase:
    coordinates: int = 0  # bitmask of T
    directions: dict[int, Orientation] = field(default_factory=dict)
    edges: dict[int, EdgeWitness] = field(default_factory=dict)
    iterations: int = 0
    queries: int = 0
    conflict: OrientationConflict | None = None


def search_phase(f: Oracle, m: int, rng: Rng) -> SearchPhase:
    """The for-loop: m searches, growing T and its orientations.

    Stops early once T = [n]; every later iteration would return None
    without querying.
    """
    n = f.n
    full = full_mask(n)
    start = f.queries
    out = SearchPhase()
    for it in range(m):
        if out.coordinates == full:
            break
        out.iterations = it + 1
        found = _find(f, n, out.coordinates, rng)
        if found is None:
            continue
        i, b, edge = found
        if i in out.edges:
            # unreachable: the search never returns a coordinate already in T
            prev = out.edges[i]
            assert prev.orientation is not b, "coordinate found twice"
            out.conflict = OrientationConflict(prev, edge)
            break
        out.coordinates |= 1 << i
        out.directions[i] = b
        out.edges[i] = edge
    out.queries = f.queries - start
    return out


def edge_monotonicity_tester(
    f: Oracle,
    active: Iterable[int],
    directions: Mapping[int, Orientation],
    epsilon,
    rng: Rng,
    q: int | None = None,
) -> Verdict:
    """Edge tester for monotonicity with respect to ``directions``.

    Samples ``q`` edges (default ceil(5 |active| / epsilon)), each along a
    uniform active coordinate at a uniform point, and makes exactly 2q queries.
    Never rejects a function that is monotone w.r.t. ``directions``.
    """
    amask = mask_of(active, f.n)
    coords = members(amask)
    if set(directions) != set(coords):
        raise ContractError("directions must be given for exactly the active coordinates")
    if not coords:
        return ACCEPT
    if q is None:
        q = mono_sample_count(len(coords), epsilon)
    n, k = f.n, len(coords)
    dirs = [directions[i] for i in coords]
    found = None
    for _ in range(q):
        j = rng.below(k)
        i = coords[j]
        lower = rng.bits(n) & ~(1 << i)
        a, b = f(lower), f(lower | (1 << i))
        if found is None and a != b:
            if (b > a) != (dirs[j] is UP):
                found = DirectionViolation(EdgeWitness(lower, i, a, b), dirs[j])
    return ACCEPT if found is None else reject(found)


@dataclass
class UnatenessRun:
    verdict: Verdict
    coordinates: tuple[int, ...]
    directions: dict[int, Orientation]
    iterations: int
    loop_queries: int
    mono_queries: int
    mono_samples: int
    w: int | None = None

    @property
    def queries(self) -> int:
        return self.loop_queries + self.mono_queries


def run_unateness_tester(f: Oracle, cfg: TesterConfig, rng: Rng | None = None) -> UnatenessRun:
    """Full tester with per-phase accounting; see :func:`unateness_tester`."""
    if f.n < 1:
        raise ContractError("the tester needs n >= 1")
    if rng is None:
        rng = Rng(cfg.seed)
    n = f.n
    phase = search_phase(f, cfg.iterations(n), rng)
    coords = tuple(members(phase.coordinates))

    def done(verdict, mono_q=0, samples=0, w=None):
        return UnatenessRun(verdict, coords, dict(phase.directions), phase.iterations,
                            phase.queries, mono_q, samples, w)

    if phase.conflict is not None:
        return done(reject(phase.conflict))
    if not coords:
        return done(ACCEPT)

    w = rng.bits(n) & ~phase.coordinates
    restricted = restrict(f, Restriction(n, phase.coordinates, w))
    q = cfg.mono_samples(len(coords))
    start = f.queries
    verdict = edge_monotonicity_tester(restricted, coords, phase.directions,
                                       _exact(cfg.epsilon) / 2, rng, q=q)
    mono_q = f.queries - start
    if verdict.rejected:
        bad = verdict.witness.edge
        # lift to the original oracle and pair with the edge that fixed b_i
        lifted = EdgeWitness((bad.lower & phase.coordinates) | w, bad.coordinate, bad.value_at_lower, bad.value_at_upper)
        verdict = reject(OrientationConflict(phase.edges[bad.coordinate], lifted))
    return done(verdict, mono_q, q, w)


def unateness_tester(f: Oracle, cfg: TesterConfig, rng: Rng | None = None) -> Verdict:
    """Adaptive unateness tester.

    Runs ``m = ceil(2n / (c * epsilon))`` influential-coordinate searches, fixes
    the coordinates outside the found set T to a uniform w, and edge-tests
    f_{T,w} for monotonicity along T in the discovered orientations at
    proximity epsilon / 2. One-sided: unate functions are always accepted.
    """
    return run_unateness_tester(f, cfg, rng).verdict


def estimate_cvar(f: Oracle, T: Iterable[int], samples: int, rng: Rng) -> float:
    """Monte-Carlo estimate of Pr[f(x) != f(y)], y re-randomized outside T."""
    if samples < 1:
        raise ContractError("samples must be >= 1")
    n = f.n
    tmask = mask_of(T, n)
    free = full_mask(n) & ~tmask
    hits = 0
    for _ in range(samples):
        x = rng.bits(n)
        y = (x & tmask) | (rng.bits(n) & free)
        if f(x) != f(y):
            hits += 1
    return hits / samples
