"""The swap-equivalence relation, canonical decompositions, and signatures.

Two elements are equivalent when transposing them (fixing everything
else) is an automorphism; an element interpreting a constant is only
equivalent to itself, since the transposition would move a named point.
The decomposition lists the classes by size and extracts, for every
atomic pattern, the set of class-index tuples on which it holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import OutOfRange
from .structures import Structure, apply_bijection


@dataclass(frozen=True)
class AtomicDiff:
    """A relation applied to a variable pattern with distinct variable values.

    ``pattern`` assigns each slot a variable index (0-based, numbered by
    first occurrence); repeated indices encode diagonal atoms like
    R(x,x).  Distinctness is imposed across different variables only.
    """

    rel: str
    pattern: tuple[int, ...]

    def __post_init__(self):
        seen: list[int] = []
        for v in self.pattern:
            if v == len(seen):
                seen.append(v)
            elif v > len(seen):
                raise ValueError("pattern must number variables by first occurrence")

    @property
    def num_vars(self) -> int:
        return max(self.pattern) + 1

    def key(self) -> str:
        return f"{self.rel}({','.join('x%d' % (v + 1) for v in self.pattern)})"

    def expand(self, var_values: tuple[int, ...]) -> tuple[int, ...]:
        """Substitute variable values into the slot pattern."""
        return tuple(var_values[v] for v in self.pattern)


def _growth_pattern(t: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Restricted-growth pattern of a tuple plus its distinct values in order."""
    order: dict[int, int] = {}
    pattern = []
    for e in t:
        if e not in order:
            order[e] = len(order)
        pattern.append(order[e])
    return tuple(pattern), tuple(order)


def atomic_diffs(language) -> list[AtomicDiff]:
    """All variable patterns (set partitions of slot positions) per relation."""
    out = []
    for name, arity in language.relations:
        for pattern in _growth_strings(arity):
            out.append(AtomicDiff(name, pattern))
    return out


def _growth_strings(length: int) -> list[tuple[int, ...]]:
    strings = [()]
    for _ in range(length):
        nxt = []
        for s in strings:
            top = max(s, default=-1)
            for v in range(top + 2):
                nxt.append(s + (v,))
        strings = nxt
    return [s for s in strings]


def atomic_diff_from_key(language, key: str) -> AtomicDiff:
    rel, rest = key.split("(", 1)
    slots = rest.rstrip(")").split(",") if rest.rstrip(")") else []
    return AtomicDiff(rel, tuple(int(s.strip().lstrip("x")) - 1 for s in slots))


def realizations(struct: Structure, diff: AtomicDiff) -> set[tuple[int, ...]]:
    """Distinct-variable tuples realizing the atom in the structure."""
    out = set()
    for t in struct.tuples_of(diff.rel):
        pattern, values = _growth_pattern(t)
        if pattern == diff.pattern:
            out.add(values)
    return out


# ---------------------------------------------------------------------------


def sim_related(struct: Structure, a: int, b: int) -> bool:
    """True iff swapping a and b (fixing the rest) preserves the structure."""
    for e in (a, b):
        if e < 1 or e > struct.n:
            raise OutOfRange(f"element {e} outside [{struct.n}]")
    if a == b:
        return True
    swap = {e: e for e in struct.elements()}
    swap[a], swap[b] = b, a
    return apply_bijection(struct, swap) == struct


@dataclass(frozen=True)
class Decomposition:
    """Equivalence classes ordered by size with per-atom index signatures."""

    classes: tuple[frozenset[int], ...]
    sigma: tuple[tuple[AtomicDiff, frozenset[tuple[int, ...]]], ...]

    @property
    def k(self) -> int:
        return len(self.classes)

    def class_of(self, element: int) -> int:
        """1-based index of the class containing the element."""
        for i, cls in enumerate(self.classes, start=1):
            if element in cls:
                return i
        raise OutOfRange(f"element {element} in no class")

    def sigma_of(self, diff: AtomicDiff) -> frozenset[tuple[int, ...]]:
        for d, s in self.sigma:
            if d == diff:
                return s
        raise KeyError(diff)

    def sigma_dict(self) -> dict[AtomicDiff, frozenset[tuple[int, ...]]]:
        return dict(self.sigma)


def decomposition(struct: Structure) -> Decomposition:
    """Canonical decomposition: classes sorted by (size, least element).

    The signature of every atomic pattern is verified by reconstruction
    against the structure before returning.
    """
    classes = _sim_classes(struct)
    index = {}
    for i, cls in enumerate(classes, start=1):
        for e in cls:
            index[e] = i
    sigma = []
    for diff in atomic_diffs(struct.language):
        realized = realizations(struct, diff)
        entries = frozenset(tuple(index[e] for e in values) for values in realized)
        sigma.append((diff, entries))
    decomp = Decomposition(tuple(classes), tuple(sigma))
    _verify_reconstruction(struct, decomp)
    return decomp


def class_count(struct: Structure) -> int:
    return len(_sim_classes(struct))


def _sim_classes(struct: Structure) -> list[frozenset[int]]:
    parent = list(range(struct.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    elems = list(struct.elements())
    for i, a in enumerate(elems):
        for b in elems[i + 1:]:
            if find(a) != find(b) and sim_related(struct, a, b):
                parent[find(a)] = find(b)
    groups: dict[int, set[int]] = {}
    for e in elems:
        groups.setdefault(find(e), set()).add(e)
    return sorted((frozenset(g) for g in groups.values()), key=lambda c: (len(c), min(c)))


def reconstruct_atom(
    classes: tuple[frozenset[int], ...],
    entries: frozenset[tuple[int, ...]],
    diff: AtomicDiff,
) -> set[tuple[int, ...]]:
    """Expand class-index entries back into concrete structure tuples."""
    tuples: set[tuple[int, ...]] = set()
    for idx in entries:
        pools = [classes[i - 1] for i in idx]
        for values in itertools.product(*pools):
            if len(set(values)) == len(values):
                tuples.add(diff.expand(values))
    return tuples


def _verify_reconstruction(struct: Structure, decomp: Decomposition):
    rebuilt: dict[str, set[tuple[int, ...]]] = {name: set() for name, _ in struct.language.relations}
    for diff, entries in decomp.sigma:
        rebuilt[diff.rel] |= reconstruct_atom(decomp.classes, entries, diff)
    for (name, _), tuples in zip(struct.language.relations, struct.rel_tuples):
        if rebuilt[name] != set(tuples):
            raise RuntimeError(
                f"signature reconstruction mismatch for {name}: "
                "the swap-equivalence classes do not induce full slices"
            )


def decomposition_to_json(decomp: Decomposition) -> dict:
    return {
        "classes": [sorted(cls) for cls in decomp.classes],
        "sigma": {
            diff.key(): sorted(list(t) for t in entries)
            for diff, entries in decomp.sigma
        },
    }
