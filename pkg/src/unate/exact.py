"""Exhaustive oracles over full truth tables.

All distances are exact ``Fraction`` values with denominator 2^n. Distance to
a monotone class is a minimum s-t cut on the hypercube order graph, solved
with scipy's integer max-flow.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from .boolfn import (
    DOWN,
    UP,
    ContractError,
    EdgeWitness,
    Orientation,
    TruthTable,
    all_up,
    directions_from_mask,
    down_mask,
    full_mask,
    is_total,
    mask_of,
)

MINCUT_CAP = 16
UNATE_CAP = 12
BRUTE_FORCE_CAP = 4


def _index(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def distance(f: TruthTable, g: TruthTable) -> Fraction:
    if f.n != g.n:
        raise ContractError(f"dimension mismatch: {f.n} vs {g.n}")
    diff = int(np.count_nonzero(f.array != g.array))
    return Fraction(diff, 1 << f.n)


def _violations(vals: np.ndarray, n: int, i: int, b: Orientation) -> np.ndarray:
    idx = _index(n)
    lower = idx[((idx >> i) & 1) == 0]
    lo, hi = vals[lower], vals[lower | (1 << i)]
    bad = lo > hi if b is UP else lo < hi
    return lower[bad]


def is_monotone_wrt(f: TruthTable, B: Mapping[int, Orientation]) -> tuple[bool, EdgeWitness | None]:
    """Edge-based decision of B-monotonicity; returns a violating edge if any."""
    if not is_total(B, f.n):
        raise ContractError("is_monotone_wrt needs a total direction map")
    vals = f.array
    for i in range(f.n):
        bad = _violations(vals, f.n, i, B[i])
        if len(bad):
            x = int(bad[0])
            return False, EdgeWitness(x, i, int(vals[x]), int(vals[x | (1 << i)]))
    return True, None


def is_unate(f: TruthTable) -> tuple[bool, dict[int, Orientation] | int]:
    """Returns ``(True, certifying directions)`` or ``(False, conflicting coordinate)``."""
    vals = f.array
    idx = _index(f.n)
    B = {}
    for i in range(f.n):
        lower = idx[((idx >> i) & 1) == 0]
        lo, hi = vals[lower], vals[lower | (1 << i)]
        inc, dec = bool((lo < hi).any()), bool((lo > hi).any())
        if inc and dec:
            return False, i
        B[i] = DOWN if dec else UP
    return True, B


def violating_edge_fraction(f: TruthTable, active: Iterable[int], B: Mapping[int, Orientation]) -> Fraction:
    """Fraction of edges along ``active`` coordinates that violate ``B``."""
    coords = sorted(set(active))
    if not coords:
        return Fraction(0)
    bad = sum(len(_violations(f.array, f.n, i, B[i])) for i in coords)
    return Fraction(bad, len(coords) << (f.n - 1))


@dataclass(frozen=True)
class DistanceReport:
    distance: Fraction
    witness: TruthTable
    directions: dict[int, Orientation] | None = None

    def to_json_obj(self) -> dict:
        from .boolfn import format_directions

        out = {
            "distance": str(self.distance),
            "distance_float": float(self.distance),
            "witness": self.witness.to_json_obj(),
        }
        if self.directions is not None:
            out["directions"] = format_directions(self.directions, self.witness.n)
        return out


@lru_cache(maxsize=None)
def _order_arcs(n: int) -> tuple[np.ndarray, np.ndarray]:
    idx = _index(n)
    rows, cols = [], []
    for i in range(n):
        lower = idx[((idx >> i) & 1) == 0]
        rows.append(lower)
        cols.append(lower | (1 << i))
    if not rows:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(rows), np.concatenate(cols)


def _min_cut(vals: np.ndarray, n: int, want_side: bool = True) -> tuple[int, np.ndarray | None]:
    """Fewest value changes making ``vals`` monotone (standard order).

    Network: source -> x (cap 1) where vals[x] = 1, x -> sink (cap 1) where
    vals[x] = 0, and x -> x + e_i with capacity 2^n + 1 for every cover pair.
    Source-side nodes of a minimum cut form the up-set of a closest monotone
    function.
    """
    size = 1 << n
    if not vals.any() or vals.all():
        return 0, (vals.copy() if want_side else None)
    src, snk = size, size + 1
    inf = size + 1
    ar, ac = _order_arcs(n)
    ones = np.flatnonzero(vals == 1)
    zeros = np.flatnonzero(vals == 0)
    rows = np.concatenate([ar, np.full(len(ones), src), zeros])
    cols = np.concatenate([ac, ones, np.full(len(zeros), snk)])
    caps = np.concatenate([
        np.full(len(ar), inf, dtype=np.int32),
        np.ones(len(ones) + len(zeros), dtype=np.int32),
    ])
    graph = csr_matrix((caps, (rows, cols)), shape=(size + 2, size + 2), dtype=np.int32)
    res = maximum_flow(graph, src, snk, method="dinic")
    if not want_side:
        return int(res.flow_value), None
    residual = (graph - res.flow).tocsr()
    residual.data[residual.data < 0] = 0
    residual.eliminate_zeros()
    reach = breadth_first_order(residual, src, directed=True, return_predecessors=False)
    side = np.zeros(size + 2, dtype=np.uint8)
    side[reach] = 1
    return int(res.flow_value), side[:size]


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ContractError(f"n={n} exceeds the exact-oracle cap of {cap}")


def distance_to_monotone(f: TruthTable, B: Mapping[int, Orientation] | None = None) -> DistanceReport:
    """Exact distance from ``f`` to the functions monotone w.r.t. ``B`` (default all-up)."""
    _check_cap(f.n, MINCUT_CAP)
    if B is None:
        B = all_up(f.n)
    if not is_total(B, f.n):
        raise ContractError("distance_to_monotone needs a total direction map")
    idx = _index(f.n)
    dm = down_mask(B)
    flipped = f.array[idx ^ dm]
    cut, side = _min_cut(flipped, f.n)
    witness = TruthTable(f.n, side[idx ^ dm])
    # the cut must be realized by the witness, and the witness must be in the class
    assert int(np.count_nonzero(witness.array != f.array)) == cut
    assert is_monotone_wrt(witness, B)[0]
    return DistanceReport(Fraction(cut, 1 << f.n), witness, dict(B))


def distance_to_unate(f: TruthTable, shortcut: bool = True) -> DistanceReport:
    """Exact distance to unateness: minimum over all 2^n direction maps.

    With ``shortcut``, unate inputs are answered directly with their
    certificate (distance 0). Ties go to the smallest down-mask.
    """
    _check_cap(f.n, UNATE_CAP)
    if shortcut:
        ok, cert = is_unate(f)
        if ok:
            return DistanceReport(Fraction(0), f.fresh(), cert)
    n = f.n
    idx = _index(n)
    best, best_down = None, 0
    for down in range(1 << n):
        cut, _ = _min_cut(f.array[idx ^ down], n, want_side=False)
        if best is None or cut < best:
            best, best_down = cut, down
    return distance_to_monotone(f, directions_from_mask(best_down, n))


def _fiber_counts(f: TruthTable, tmask: int) -> tuple[np.ndarray, int]:
    """Count of ones in each fiber {x : x_T = z}, indexed by z as a masked int."""
    idx = _index(f.n)
    keys = idx & tmask
    counts = np.bincount(keys[f.array == 1], minlength=1 << f.n)
    fiber_size = 1 << (f.n - bin(tmask).count("1"))
    return counts, fiber_size


def exact_cvar(f: TruthTable, T: Iterable[int]) -> Fraction:
    """Pr[f(x) != f(y)] with x uniform and y re-randomized outside T.

    Equals 2 * E_z[p_z (1 - p_z)] over the fibers of T.
    """
    tmask = mask_of(T, f.n)
    counts, k = _fiber_counts(f, tmask)
    t = bin(tmask).count("1")
    total = int(np.sum(counts * (k - counts), dtype=np.int64))
    return Fraction(2 * total, k * k << t)


def maj_restriction(f: TruthTable, T: Iterable[int]) -> TruthTable:
    """Fiberwise majority over T; exact ties resolve to 0."""
    tmask = mask_of(T, f.n)
    counts, k = _fiber_counts(f, tmask)
    keys = _index(f.n) & tmask
    return TruthTable(f.n, (2 * counts[keys] > k).astype(np.uint8))


def restriction_table(f: TruthTable, T: Iterable[int], w: int) -> TruthTable:
    """Truth table of f_{T,w}; ``w`` is a point whose bits inside T are ignored."""
    tmask = mask_of(T, f.n)
    idx = _index(f.n)
    fixed = full_mask(f.n) & ~tmask
    return TruthTable(f.n, f.array[(idx & tmask) | (w & fixed)])


def restriction_distances(f: TruthTable, T: Iterable[int], g: TruthTable | None = None) -> tuple[list[int], np.ndarray]:
    """For every assignment w of [n] \\ T, the Hamming distance between f_{T,w}
    and ``g`` (default ``f`` itself). Returns the list of w and the counts."""
    tmask = mask_of(T, f.n)
    idx = _index(f.n)
    fixed = full_mask(f.n) & ~tmask
    ws = idx[(idx & tmask) == 0]
    ref = f.array if g is None else g.array
    grid = f.array[(idx & tmask)[:, None] | ws[None, :]]
    return [int(w) for w in ws], np.count_nonzero(grid != ref[:, None], axis=0)


# ------------------------------------------------ brute-force cross-check oracle

def _comparable_pairs(n: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(1 << n) for y in range(1 << n) if x != y and x & y == x]


@lru_cache(maxsize=None)
def monotone_functions(n: int) -> np.ndarray:
    """Every monotone function on n <= 4 variables, as integer-encoded tables
    (bit j = value at point j). Checked against all comparable pairs, not edges."""
    _check_cap(n, BRUTE_FORCE_CAP)
    codes = np.arange(1 << (1 << n), dtype=np.int64)
    ok = np.ones(len(codes), dtype=bool)
    for x, y in _comparable_pairs(n):
        ok &= ~((((codes >> x) & 1) == 1) & (((codes >> y) & 1) == 0))
    return codes[ok]


def table_code(f: TruthTable) -> int:
    return sum(int(v) << j for j, v in enumerate(f.values))


def brute_force_distance_to_monotone(f: TruthTable, B: Mapping[int, Orientation] | None = None) -> Fraction:
    """Minimum Hamming distance to an enumerated monotone function (n <= 4)."""
    n = f.n
    _check_cap(n, BRUTE_FORCE_CAP)
    dm = 0 if B is None else down_mask(B)
    # g monotone w.r.t. B  <=>  g(x ^ down) monotone
    code = sum(int(f.values[x ^ dm]) << x for x in range(1 << n))
    diffs = np.bitwise_count(monotone_functions(n) ^ code)
    return Fraction(int(diffs.min()), 1 << n)


def brute_force_is_monotone(f: TruthTable, B: Mapping[int, Orientation]) -> bool:
    """Pair-based definition: f(x) <= f(y) for every x <_B y."""
    n = f.n
    dm = down_mask(B)
    for x, y in _comparable_pairs(n):
        if f.values[x ^ dm] > f.values[y ^ dm]:
            return False
    return True


def all_tables(n: int) -> Iterable[TruthTable]:
    for bits in product((0, 1), repeat=1 << n):
        yield TruthTable(n, bits)
