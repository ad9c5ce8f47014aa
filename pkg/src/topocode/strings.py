"""Number-based digit strings, their arithmetic, and every-zero string groups.

Digits are stored canonically: a ring of modulus M keeps every digit in
[0, M-1].  The mod-9 convention displays the residue 0 as the digit 9 in
some contexts, so rendering takes an explicit ``zero_as_nine`` switch and
parsing folds '9' into residue 0 under mod 9.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union


class StringError(ValueError):
    pass


class GroupLawError(StringError):
    """A claimed every-zero group fails its digit-wise closure law."""


@dataclass(frozen=True)
class DigitRing:
    """Digit reduction convention: all digit arithmetic is mod ``modulus``."""

    modulus: int

    def __post_init__(self) -> None:
        if not 2 <= self.modulus <= 10:
            raise StringError(f"digit ring modulus must be in [2, 10], got {self.modulus}")

    def reduce(self, value: int) -> int:
        return value % self.modulus

    def parse_digit(self, ch: str) -> int:
        d = int(ch)
        return d % self.modulus

    @property
    def name(self) -> str:
        return f"mod{self.modulus}"


MOD10 = DigitRing(10)
MOD9 = DigitRing(9)

_RING_BY_NAME = {"mod10": MOD10, "mod9": MOD9}


def ring_by_name(name: str) -> DigitRing:
    key = name.strip().lower()
    if key in _RING_BY_NAME:
        return _RING_BY_NAME[key]
    if key.startswith("mod"):
        return DigitRing(int(key[3:]))
    raise StringError(f"unknown digit ring {name!r}")


class CombineOp(Enum):
    ADD = "add"
    SUB = "sub"


class GroupOpMode(Enum):
    # ADDSUB: s_i [+] s_j [-] s_zero, index i+j-zero.
    # SUBADD: s_i [-] s_j [+] s_zero, index i-j+zero.
    ADDSUB = "addsub"
    SUBADD = "subadd"


@dataclass(frozen=True)
class DigitString:
    """An immutable string of canonical digits under a digit ring."""

    digits: tuple[int, ...]
    ring: DigitRing = MOD10

    def __post_init__(self) -> None:
        if len(self.digits) < 1:
            raise StringError("digit string must have length >= 1")
        for d in self.digits:
            if not 0 <= d < self.ring.modulus:
                raise StringError(f"digit {d} out of range for {self.ring.name}")

    @staticmethod
    def parse(text: str, ring: DigitRing = MOD10) -> "DigitString":
        if not text or not text.isdigit():
            raise StringError(f"not a digit string: {text!r}")
        return DigitString(tuple(ring.parse_digit(c) for c in text), ring)

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return self.to_text()

    def to_text(self, zero_as_nine: bool = False) -> str:
        if zero_as_nine and self.ring.modulus == 9:
            return "".join("9" if d == 0 else str(d) for d in self.digits)
        return "".join(str(d) for d in self.digits)

    def combine(self, other: "DigitString", op: CombineOp) -> "DigitString":
        if len(self) != len(other):
            raise StringError(f"length mismatch: {len(self)} vs {len(other)}")
        if self.ring != other.ring:
            raise StringError(f"ring mismatch: {self.ring.name} vs {other.ring.name}")
        if op is CombineOp.ADD:
            out = (self.ring.reduce(a + b) for a, b in zip(self.digits, other.digits))
        else:
            out = (self.ring.reduce(a - b) for a, b in zip(self.digits, other.digits))
        return DigitString(tuple(out), self.ring)

    def complement(self) -> "DigitString":
        return DigitString(tuple(self.ring.reduce(9 - d) for d in self.digits), self.ring)

    def reverse(self) -> "DigitString":
        return DigitString(tuple(reversed(self.digits)), self.ring)

    def scale(self, k: int) -> "DigitString":
        if k < 1:
            raise StringError(f"scalar must be >= 1, got {k}")
        return DigitString(tuple(self.ring.reduce(k * d) for d in self.digits), self.ring)

    def shift(self, t: int) -> "DigitString":
        return DigitString(tuple(self.ring.reduce(d + t) for d in self.digits), self.ring)

    def concat(self, other: "DigitString") -> "DigitString":
        if self.ring != other.ring:
            raise StringError("cannot concatenate strings over different rings")
        return DigitString(self.digits + other.digits, self.ring)


def digit_combine(a: DigitString, b: DigitString, op: CombineOp) -> DigitString:
    return a.combine(b, op)


def complement(s: DigitString) -> DigitString:
    return s.complement()


def reverse(s: DigitString) -> DigitString:
    return s.reverse()


def scalar_mul(k: int, s: DigitString) -> DigitString:
    return s.scale(k)


@dataclass(frozen=True)
class StringGroup:
    """A shift-generated every-zero string group.

    Element t equals the seed advanced by t*k at every active position.
    ``mask`` lists the positions that advance (None means all positions);
    ``position_moduli`` overrides the ring modulus per position.
    """

    elements: tuple[DigitString, ...]
    shift: int
    mask: frozenset[int] | None = None
    position_moduli: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.elements) < 2:
            raise StringError("string group needs order >= 2")
        lengths = {len(e) for e in self.elements}
        rings = {e.ring for e in self.elements}
        if len(lengths) != 1 or len(rings) != 1:
            raise StringError("group elements must share length and ring")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def ring(self) -> DigitRing:
        return self.elements[0].ring

    @property
    def has_collisions(self) -> bool:
        return len(set(self.elements)) < self.order

    def modulus_at(self, pos: int) -> int:
        if self.position_moduli is not None:
            return self.position_moduli[pos]
        return self.ring.modulus

    def is_active(self, pos: int) -> bool:
        return self.mask is None or pos in self.mask

    def to_json(self) -> dict:
        return {
            "seed": str(self.elements[0]),
            "k": self.shift,
            "m": self.order,
            "ring": self.ring.name,
            "mask": sorted(self.mask) if self.mask is not None else None,
        }


def build_shift_group(
    seed: DigitString,
    k: int,
    m: int,
    mask: Iterable[int] | None = None,
    position_moduli: Sequence[int] | None = None,
) -> StringGroup:
    """Build the order-m group whose element t advances the seed by t*k."""
    if m < 2:
        raise StringError(f"group order must be >= 2, got {m}")
    if k < 1:
        raise StringError(f"shift must be >= 1, got {k}")
    mask_set = frozenset(mask) if mask is not None else None
    if mask_set is not None and any(p < 0 or p >= len(seed) for p in mask_set):
        raise StringError("mask position out of range")
    moduli = tuple(position_moduli) if position_moduli is not None else None
    if moduli is not None:
        if len(moduli) != len(seed):
            raise StringError("position moduli length mismatch")
        if any(m < 2 or m > seed.ring.modulus for m in moduli):
            raise StringError("position moduli must lie in [2, ring modulus]")

    def modulus_at(pos: int) -> int:
        return moduli[pos] if moduli is not None else seed.ring.modulus

    elements = []
    for t in range(m):
        digs = []
        for pos, d in enumerate(seed.digits):
            if mask_set is None or pos in mask_set:
                digs.append((d + t * k) % modulus_at(pos))
            else:
                digs.append(d)
        elements.append(DigitString(tuple(digs), seed.ring))
    return StringGroup(tuple(elements), shift=k, mask=mask_set, position_moduli=moduli)


def group_op(
    g: StringGroup, i: int, j: int, zero: int, mode: GroupOpMode = GroupOpMode.ADDSUB
) -> int:
    """Apply the every-zero operation; returns the index of the result.

    The element at the returned index must equal the digit-wise computation
    (s_i [+] s_j [-] s_zero for ADDSUB, s_i [-] s_j [+] s_zero for SUBADD);
    a mismatch means the group is not closed and raises GroupLawError.
    """
    m = g.order
    for idx in (i, j, zero):
        if not 0 <= idx < m:
            raise StringError(f"index {idx} out of range for order-{m} group")
    if mode is GroupOpMode.ADDSUB:
        lam = (i + j - zero) % m
    else:
        lam = (i - j + zero) % m
    a, b, c = g.elements[i].digits, g.elements[j].digits, g.elements[zero].digits
    for pos in range(len(a)):
        mod = g.modulus_at(pos)
        if mode is GroupOpMode.ADDSUB:
            value = (a[pos] + b[pos] - c[pos]) % mod
        else:
            value = (a[pos] - b[pos] + c[pos]) % mod
        if value != g.elements[lam].digits[pos]:
            raise GroupLawError(
                f"digit-wise result differs from element {lam} at position {pos}"
            )
    return lam


# ---------------------------------------------------------------------------
# Super-strings: segments carrying their own all-nines modulus.
# ---------------------------------------------------------------------------


def _is_all_nines(m: int) -> bool:
    return m > 0 and set(str(m)) == {"9"}


@dataclass(frozen=True)
class SuperString:
    """Segments (value, modulus) with each modulus of the form 10^a - 1."""

    segments: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.segments) < 1:
            raise StringError("super-string needs at least one segment")
        for value, modulus in self.segments:
            if not _is_all_nines(modulus):
                raise StringError(f"segment modulus {modulus} is not of the form 10^a - 1")
            if not 0 <= value <= modulus:
                raise StringError(f"segment value {value} out of [0, {modulus}]")

    @staticmethod
    def parse(text: str) -> "SuperString":
        segs = []
        for part in text.split(","):
            value_text, _, modulus_text = part.strip().partition("|")
            if not modulus_text:
                raise StringError(f"segment {part!r} missing '|modulus'")
            segs.append((int(value_text), int(modulus_text)))
        return SuperString(tuple(segs))

    def __str__(self) -> str:
        return ",".join(f"{v}|{m}" for v, m in self.segments)

    def values(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.segments)


def super_arith(s: SuperString, t: int, sign: str = "+") -> SuperString:
    """Uniform arithmetic: add or subtract t in every segment mod its modulus."""
    if t < 0:
        raise StringError("shift must be non-negative")
    if sign not in ("+", "-"):
        raise StringError(f"sign must be '+' or '-', got {sign!r}")
    delta = t if sign == "+" else -t
    return SuperString(tuple((((v + delta) % m), m) for v, m in s.segments))


# ---------------------------------------------------------------------------
# Self-breeding string sets.
# ---------------------------------------------------------------------------

# An element of generation t+1 concatenates a full permutation of generation t,
# so generations grow as iterated factorials; only small generations are ever
# materialized while byte counts stay exact via integer arithmetic.
_MATERIALIZE_LIMIT = 4000
# factorial(n) for n beyond this cannot be held in memory as an exact integer
_FACTORIAL_ARG_LIMIT = 200_000


def self_breed(
    strings: Sequence[DigitString | str],
    depth: int,
    seed: int = 0,
    sample_limit: int = 64,
) -> tuple[list[DigitString], int]:
    """Breed the string set ``depth`` times; return (samples, exact total bytes).

    The total byte count of generation depth+1 is byte(S_1) * prod((M_j)!)
    where M_1 = |S_1| and M_{j+1} = (M_j)!.
    """
    if len(strings) < 2:
        raise StringError("self-breeding needs at least two strings")
    if depth < 1:
        raise StringError("depth must be >= 1")
    base = [s if isinstance(s, DigitString) else DigitString.parse(s) for s in strings]
    byte1 = sum(len(s) for s in base)

    sizes = [len(base)]
    total = byte1
    for _ in range(depth):
        if sizes[-1] > _FACTORIAL_ARG_LIMIT:
            raise StringError(
                f"exact byte count needs factorial({sizes[-1]}), which cannot be "
                "represented; reduce the depth"
            )
        step = math.factorial(sizes[-1])
        total *= step
        sizes.append(step)

    rng = random.Random(seed)
    generation: list[DigitString] | None = base
    for level_size in sizes[:-1]:
        if generation is None or math.factorial(level_size) > _MATERIALIZE_LIMIT:
            generation = None
            break
        next_gen = []
        for perm in _all_permutations_bounded(generation):
            next_gen.append(_concat_all(perm))
        generation = next_gen

    samples: list[DigitString] = []
    if generation is not None:
        count = min(sample_limit, len(generation))
        samples = list(generation[:count])
    else:
        # Materialize a bounded sample of the deepest reachable generation by
        # drawing random permutations level by level.
        reachable = base
        for level_size in sizes[:-1]:
            if math.factorial(level_size) <= _MATERIALIZE_LIMIT:
                reachable = [_concat_all(p) for p in _all_permutations_bounded(reachable)]
            else:
                drawn = []
                for _ in range(sample_limit):
                    perm = list(reachable)
                    rng.shuffle(perm)
                    drawn.append(_concat_all(perm))
                samples = drawn
                break
    return samples, total


def _all_permutations_bounded(items: list[DigitString]) -> Iterable[list[DigitString]]:
    return (list(p) for p in itertools.permutations(items))


def _concat_all(items: Sequence[DigitString]) -> DigitString:
    rings = {s.ring for s in items}
    if len(rings) != 1:
        raise StringError("cannot concatenate strings over different rings")
    digits = tuple(itertools.chain.from_iterable(s.digits for s in items))
    return DigitString(digits, items[0].ring)


# ---------------------------------------------------------------------------
# Multi-level rank trees.
# ---------------------------------------------------------------------------

LevelNode = Union[DigitString, Sequence["LevelNode"]]


def flatten_multilevel(node: LevelNode) -> DigitString:
    """Depth-first concatenation of a nested rank tree with DigitString leaves."""
    if isinstance(node, DigitString):
        return node
    children = list(node)
    if not children:
        raise StringError("empty node in multi-level string spec")
    return _concat_all([flatten_multilevel(c) for c in children])


# ---------------------------------------------------------------------------
# Integer-partitioned and integer-decomposed strings.
# ---------------------------------------------------------------------------


class PartitionMode(Enum):
    SUM = "sum"
    PRODUCT = "product"


@dataclass(frozen=True)
class PartitionSpec:
    target: int
    parts: tuple[int, ...]
    mode: PartitionMode

    def __post_init__(self) -> None:
        if self.mode is PartitionMode.SUM:
            if sum(self.parts) != self.target or any(p <= 0 for p in self.parts):
                raise StringError(f"invalid sum partition {self.parts} of {self.target}")
        else:
            if math.prod(self.parts) != self.target or any(p < 3 for p in self.parts):
                raise StringError(f"invalid product partition {self.parts} of {self.target}")

    def to_string(self) -> DigitString:
        return DigitString.parse("".join(str(p) for p in self.parts))


def _sum_partitions(m: int, max_part: int) -> Iterable[tuple[int, ...]]:
    # Non-increasing parts, emitted in descending lexicographic order.
    if m == 0:
        yield ()
        return
    for first in range(min(m, max_part), 0, -1):
        for rest in _sum_partitions(m - first, first):
            yield (first,) + rest


def _product_partitions(m: int, max_factor: int) -> Iterable[tuple[int, ...]]:
    if m == 1:
        yield ()
        return
    for first in range(min(m, max_factor), 2, -1):
        if m % first == 0:
            for rest in _product_partitions(m // first, first):
                yield (first,) + rest


def partition_strings(
    m: int, mode: PartitionMode, limit: int | None = None
) -> list[tuple[PartitionSpec, DigitString]]:
    """All >=2-part partitions (SUM) or >=2-factor decompositions (PRODUCT) of m.

    Enumeration is deterministic: descending lexicographic on the
    non-increasing part sequences.  PRODUCT factors are all >= 3; a value
    with no such decomposition yields an empty list.
    """
    if mode is PartitionMode.SUM and m < 2:
        raise StringError("SUM partitioning needs m >= 2")
    if mode is PartitionMode.PRODUCT and m < 2:
        raise StringError("PRODUCT decomposition needs m >= 2")
    out: list[tuple[PartitionSpec, DigitString]] = []
    gen = _sum_partitions(m, m - 1) if mode is PartitionMode.SUM else _product_partitions(m, m)
    for parts in gen:
        if len(parts) < 2:
            continue
        spec = PartitionSpec(m, parts, mode)
        out.append((spec, spec.to_string()))
        if limit is not None and len(out) >= limit:
            break
    return out
