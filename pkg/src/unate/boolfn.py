"""Boolean functions on the hypercube {0,1}^n.

Points are plain ints with coordinate i stored in bit i (LSB first).
Coordinate sets are handled as bitmasks internally; the public helpers accept
any iterable of indices and convert with :func:`mask_of`.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

MAX_DIM = 30
MAX_TABLE_DIM = 24


class ContractError(ValueError):
    """Raised when an operation's preconditions are not met."""


def _check_dim(n: int, cap: int = MAX_DIM) -> None:
    if not 0 <= n <= cap:
        raise ContractError(f"dimension n={n} outside supported range [0, {cap}]")


# ---------------------------------------------------------------- points/sets

def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(coords: Iterable[int], n: int | None = None) -> int:
    m = 0
    for i in coords:
        i = int(i)
        if i < 0 or (n is not None and i >= n):
            raise ContractError(f"coordinate {i} out of range for n={n}")
        m |= 1 << i
    return m


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def complement(coords: Iterable[int], n: int) -> frozenset[int]:
    return frozenset(members(full_mask(n) & ~mask_of(coords, n)))


def flip(x: int, i: int) -> int:
    return x ^ (1 << i)


def bit(x: int, i: int) -> int:
    return (x >> i) & 1


def point_from_bits(bits: Iterable[int]) -> int:
    x = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ContractError(f"bit {i} is {b!r}, expected 0 or 1")
        x |= b << i
    return x


def point_to_bits(x: int, n: int) -> list[int]:
    return [(x >> i) & 1 for i in range(n)]


def compose(x: int, S: Iterable[int], y: int, T: Iterable[int], n: int) -> int:
    """The point agreeing with ``x`` on ``S`` and with ``y`` on ``T``.

    ``S`` and ``T`` must partition ``range(n)``.
    """
    s, t = mask_of(S, n), mask_of(T, n)
    if s & t:
        raise ContractError("coordinate sets overlap")
    if s | t != full_mask(n):
        raise ContractError("coordinate sets do not cover [n]")
    return (x & s) | (y & t)


# --------------------------------------------------------------- orientations

class Orientation(enum.Enum):
    UP = "up"
    DOWN = "down"

    @property
    def opposite(self) -> "Orientation":
        return Orientation.DOWN if self is Orientation.UP else Orientation.UP

    @property
    def symbol(self) -> str:
        return "u" if self is Orientation.UP else "d"


UP = Orientation.UP
DOWN = Orientation.DOWN

DirectionMap = dict  # coordinate -> Orientation


def all_up(n: int) -> dict[int, Orientation]:
    return {i: UP for i in range(n)}


def directions_from_mask(down: int, n: int) -> dict[int, Orientation]:
    return {i: DOWN if (down >> i) & 1 else UP for i in range(n)}


def down_mask(B: Mapping[int, Orientation]) -> int:
    return mask_of(i for i, b in B.items() if b is DOWN)


def is_total(B: Mapping[int, Orientation], n: int) -> bool:
    return set(B) == set(range(n))


def parse_directions(text: str, n: int) -> dict[int, Orientation]:
    """Parse ``"all-up"``, ``"all-down"`` or a string of u/d characters, one
    per coordinate starting at coordinate 0."""
    t = text.strip().lower()
    if t in ("all-up", "up"):
        return all_up(n)
    if t in ("all-down", "down"):
        return {i: DOWN for i in range(n)}
    if len(t) != n or set(t) - {"u", "d"}:
        raise ContractError(f"direction string {text!r} must be {n} characters of u/d")
    return {i: UP if ch == "u" else DOWN for i, ch in enumerate(t)}


def format_directions(B: Mapping[int, Orientation], n: int) -> str:
    return "".join(B[i].symbol if i in B else "." for i in range(n))


@dataclass(frozen=True)
class EdgeWitness:
    """An influential hypercube edge (lower, lower + e_i)."""

    lower: int
    coordinate: int
    value_at_lower: int
    value_at_upper: int

    def __post_init__(self):
        if (self.lower >> self.coordinate) & 1:
            raise ContractError("lower endpoint must have the edge coordinate set to 0")
        if self.value_at_lower == self.value_at_upper:
            raise ContractError("edge is not influential")

    @property
    def upper(self) -> int:
        return self.lower | (1 << self.coordinate)

    @property
    def orientation(self) -> Orientation:
        return UP if self.value_at_upper > self.value_at_lower else DOWN

    @classmethod
    def from_pair(cls, x: int, fx: int, y: int, fy: int) -> "EdgeWitness":
        d = x ^ y
        if d == 0 or d & (d - 1):
            raise ContractError("points do not differ in exactly one coordinate")
        i = d.bit_length() - 1
        if x & d:
            x, fx, y, fy = y, fy, x, fx
        return cls(x, i, fx, fy)

    def recheck(self, f: "Oracle") -> bool:
        """Re-query both endpoints (2 queries) and confirm the recorded values."""
        return f(self.lower) == self.value_at_lower and f(self.upper) == self.value_at_upper

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "coordinate": self.coordinate,
            "value_at_lower": self.value_at_lower,
            "value_at_upper": self.value_at_upper,
            "orientation": self.orientation.value,
        }


# -------------------------------------------------------------------- oracles

class Oracle:
    """Query access to a Boolean function on {0,1}^n.

    Calling the oracle evaluates it and adds one to ``queries``. The counter
    is a plain int: each experiment trial owns its own oracle instance.
    """

    n: int
    queries: int

    def __call__(self, x: int) -> int:
        raise NotImplementedError

    def table(self) -> "TruthTable":
        """Materialize into a fresh truth table (bypasses the counter)."""
        _check_dim(self.n, MAX_TABLE_DIM)
        return TruthTable(self.n, bytes(self._peek(x) for x in range(1 << self.n)))

    def _peek(self, x: int) -> int:
        raise NotImplementedError


class FunctionOracle(Oracle):
    def __init__(self, n: int, fn: Callable[[int], int | bool]):
        _check_dim(n)
        self.n = n
        self.fn = fn
        self.queries = 0

    def __call__(self, x: int) -> int:
        self.queries += 1
        return int(self.fn(x))

    def _peek(self, x: int) -> int:
        return int(self.fn(x))


class TruthTable(Oracle):
    """Explicit 2^n-entry table; entry j is f at the point with integer index j."""

    def __init__(self, n: int, values: bytes | bytearray | np.ndarray | Iterable[int]):
        _check_dim(n, MAX_TABLE_DIM)
        if isinstance(values, np.ndarray):
            data = np.asarray(values, dtype=np.uint8).tobytes()
        else:
            data = bytes(values)
        if len(data) != 1 << n:
            raise ContractError(f"table length {len(data)} != 2^{n}")
        if data.translate(None, b"\x00\x01"):
            raise ContractError("table entries must be 0 or 1")
        self.n = n
        self.values = data
        self.queries = 0

    def __call__(self, x: int) -> int:
        self.queries += 1
        return self.values[x]

    def _peek(self, x: int) -> int:
        return self.values[x]

    @property
    def array(self) -> np.ndarray:
        return np.frombuffer(self.values, dtype=np.uint8)

    def table(self) -> "TruthTable":
        return self.fresh()

    def fresh(self) -> "TruthTable":
        """Same function, new counter at zero."""
        t = TruthTable.__new__(TruthTable)
        t.n, t.values, t.queries = self.n, self.values, 0
        return t

    def negated(self) -> "TruthTable":
        return TruthTable(self.n, 1 - self.array)

    def weight(self) -> int:
        return self.values.count(1)

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and self.values == other.values

    __hash__ = None

    def __repr__(self):
        head = "".join(str(v) for v in self.values[:64])
        return f"TruthTable(n={self.n}, {head}{'...' if len(self.values) > 64 else ''})"

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int], int | bool]) -> "TruthTable":
        _check_dim(n, MAX_TABLE_DIM)
        return cls(n, bytes(int(bool(fn(x))) for x in range(1 << n)))

    # -- file format: {"n": n, "table_hex": hex of the little-endian bit stream}

    def to_json_obj(self) -> dict:
        packed = np.packbits(self.array, bitorder="little")
        return {"n": self.n, "table_hex": packed.tobytes().hex()}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "TruthTable":
        n = int(obj["n"])
        _check_dim(n, MAX_TABLE_DIM)
        raw = np.frombuffer(bytes.fromhex(obj["table_hex"]), dtype=np.uint8)
        size = 1 << n
        if len(raw) != (size + 7) // 8:
            raise ContractError("table_hex has the wrong length for n")
        bits = np.unpackbits(raw, bitorder="little")
        if bits[size:].any():
            raise ContractError("padding bits in table_hex must be zero")
        return cls(n, bits[:size])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj()))

    @classmethod
    def load(cls, path: str | Path) -> "TruthTable":
        return cls.from_json_obj(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Restriction:
    """Fixes the coordinates outside ``free`` to the bits of ``w``.

    ``free`` is the bitmask of T, ``w`` carries the assignment on [n] \\ T
    (its bits inside T must be zero).
    """

    n: int
    free: int
    w: int = 0

    def __post_init__(self):
        _check_dim(self.n)
        full = full_mask(self.n)
        if self.free & ~full or self.w & ~full:
            raise ContractError("restriction does not fit dimension")
        if self.w & self.free:
            raise ContractError("w assigns bits to free coordinates")

    @classmethod
    def of(cls, n: int, free: Iterable[int], w: Mapping[int, int] | int = 0) -> "Restriction":
        fm = mask_of(free, n)
        if isinstance(w, Mapping):
            if set(w) != set(members(full_mask(n) & ~fm)):
                raise ContractError("w must assign exactly the fixed coordinates")
            w = mask_of(i for i, b in w.items() if b)
        return cls(n, fm, w)

    @property
    def fixed(self) -> int:
        return full_mask(self.n) & ~self.free

    def apply(self, z: int) -> int:
        return (z & self.free) | self.w


class RestrictedOracle(Oracle):
    """f_{T,w}: z -> f(z_T o w). Queries are charged to the base oracle."""

    def __init__(self, base: Oracle, r: Restriction):
        if r.n != base.n:
            raise ContractError(f"restriction dimension {r.n} != oracle dimension {base.n}")
        self.base = base
        self.restriction = r
        self.n = base.n
        self._free = r.free
        self._w = r.w

    @property
    def queries(self) -> int:
        return self.base.queries

    def __call__(self, z: int) -> int:
        return self.base((z & self._free) | self._w)

    def _peek(self, z: int) -> int:
        return self.base._peek(self.restriction.apply(z))


class FlippedOracle(Oracle):
    """g(x) = f(x XOR down): turns B-monotonicity into standard monotonicity."""

    def __init__(self, base: Oracle, down: int):
        self.base = base
        self.n = base.n
        self.down = down

    @property
    def queries(self) -> int:
        return self.base.queries

    def __call__(self, x: int) -> int:
        return self.base(x ^ self.down)

    def _peek(self, x: int) -> int:
        return self.base._peek(x ^ self.down)


def restrict(f: Oracle, r: Restriction) -> Oracle:
    return RestrictedOracle(f, r)


def flip_by_directions(f: Oracle, B: Mapping[int, Orientation]) -> Oracle:
    if not is_total(B, f.n):
        raise ContractError("flip_by_directions needs a direction for every coordinate")
    dm = down_mask(B)
    if isinstance(f, TruthTable):
        idx = np.arange(1 << f.n, dtype=np.int64)
        return TruthTable(f.n, f.array[idx ^ dm])
    return FlippedOracle(f, dm)


# ----------------------------------------------------------------- generators

FAMILIES = (
    "constant", "dictator", "anti_dictator", "parity", "majority", "random_uniform",
    "random_monotone", "random_unate", "xor_pair", "noise_flipped",
)

# Above this dimension random_monotone uses random-weight threshold functions
# instead of projecting a random function with the min-cut oracle.
MONOTONE_PROJECTION_CAP = 12


@dataclass(frozen=True)
class FunctionSpec:
    family: str
    n: int
    params: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "n": self.n}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "FunctionSpec":
        return cls(str(obj["family"]), int(obj["n"]), dict(obj.get("params", {})))

    def with_n(self, n: int) -> "FunctionSpec":
        params = dict(self.params)
        if isinstance(params.get("base"), Mapping):
            params["base"] = {**params["base"], "n": n}
        return FunctionSpec(self.family, n, params)


def _coord(params: Mapping, key: str, n: int) -> int:
    if key not in params:
        raise ContractError(f"missing parameter {key!r}")
    i = int(params[key])
    if not 0 <= i < n:
        raise ContractError(f"parameter {key}={i} out of range for n={n}")
    return i


def _np_gen(seed: int, tag: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, tag])))


def _random_monotone(n: int, gen: np.random.Generator) -> np.ndarray:
    if n <= MONOTONE_PROJECTION_CAP:
        from .exact import distance_to_monotone

        raw = TruthTable(n, gen.integers(0, 2, size=1 << n, dtype=np.uint8))
        return distance_to_monotone(raw).witness.array.copy()
    idx = np.arange(1 << n, dtype=np.int64)
    weights = np.sort(gen.random(n))
    score = np.zeros(1 << n)
    for i in range(n):
        score += weights[i] * ((idx >> i) & 1)
    theta = gen.uniform(0, weights.sum())
    return (score >= theta).astype(np.uint8)


def generate(spec: FunctionSpec | Mapping, seed: int = 0) -> TruthTable:
    """Build the truth table of a registered function family.

    Deterministic in ``(spec, seed)``; deterministic families ignore ``seed``.
    """
    if isinstance(spec, Mapping):
        spec = FunctionSpec.from_json_obj(spec)
    n, p, fam = spec.n, spec.params, spec.family
    if fam not in FAMILIES:
        raise ContractError(f"unknown function family {fam!r}")
    if not 1 <= n <= MAX_TABLE_DIM:
        raise ContractError(f"n={n} outside truth-table range [1, {MAX_TABLE_DIM}]")
    idx = np.arange(1 << n, dtype=np.int64)
    gen = _np_gen(seed)

    if fam == "constant":
        b = int(p.get("b", 0))
        if b not in (0, 1):
            raise ContractError("constant value must be 0 or 1")
        vals = np.full(1 << n, b, dtype=np.uint8)
    elif fam == "dictator":
        vals = (idx >> _coord(p, "i", n)) & 1
    elif fam == "anti_dictator":
        vals = 1 - ((idx >> _coord(p, "i", n)) & 1)
    elif fam == "parity":
        S = p.get("S", list(range(n)))
        sm = mask_of(S, n)
        vals = np.bitwise_count(idx & sm) & 1
    elif fam == "majority":
        vals = (2 * np.bitwise_count(idx) > n).astype(np.uint8)
    elif fam == "xor_pair":
        i, j = _coord(p, "i", n), _coord(p, "j", n)
        if i == j:
            raise ContractError("xor_pair needs two distinct coordinates")
        vals = ((idx >> i) ^ (idx >> j)) & 1
    elif fam == "random_uniform":
        vals = gen.integers(0, 2, size=1 << n, dtype=np.uint8)
    elif fam == "random_monotone":
        vals = _random_monotone(n, gen)
    elif fam == "random_unate":
        mono = _random_monotone(n, gen)
        down = int(gen.integers(0, 1 << n))
        vals = mono[idx ^ down]
    else:  # noise_flipped
        rho = float(p.get("rho", -1))
        if not 0 <= rho <= 1:
            raise ContractError("noise_flipped needs rho in [0, 1]")
        if "base" not in p:
            raise ContractError("noise_flipped needs a base spec")
        base_obj = dict(p["base"])
        base_obj.setdefault("n", n)
        if int(base_obj["n"]) != n:
            raise ContractError("base spec dimension differs from n")
        base = generate(base_obj, seed).array
        noise = _np_gen(seed, 1).random(1 << n) < rho
        vals = base ^ noise.astype(np.uint8)
    return TruthTable(n, np.asarray(vals, dtype=np.uint8))
