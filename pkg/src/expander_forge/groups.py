"""Small finite groups as dense multiplication tables, plus the shipped
group catalog.

Groups are kept tiny (order <= 4000) so spectra and regular-representation
vectors stay dense. Elements are arbitrary hashable labels; all algorithms
work on indices into the element list.

Catalog file format (one entry per line, '#' starts a comment):

    NAME perm CYCLES[; CYCLES ...]    generators in 0-based cycle notation,
                                      e.g.  S3 perm (0 1); (0 1 2)
    NAME semidirect N P               sum-zero vectors mod the prime P acted
                                      on by S_N, generated by (1,-1,0,...)
                                      together with the standard pair of S_N
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .modp import FpVector, check_prime
from .perm import Permutation, standard_generators
from .semidirect import GroupElement, group_order, mul, unimaginative_vector

GROUP_ORDER_CAP = 4000


class FiniteGroup:
    """A finite group given by an element list and a dense index table."""

    def __init__(self, name: str, elements: Sequence, table: np.ndarray):
        self.name = name
        self.elements = list(elements)
        order = len(self.elements)
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (order, order):
            raise ValueError("table shape does not match element count")
        self.table = table
        self._index = {el: i for i, el in enumerate(self.elements)}
        if len(self._index) != order:
            raise ValueError("duplicate elements")

        idx = np.arange(order)
        ident = [
            e
            for e in range(order)
            if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx)
        ]
        if len(ident) != 1:
            raise ValueError("table has no unique identity")
        self.identity_index = ident[0]
        inv = np.full(order, -1, dtype=np.int64)
        where = np.argwhere(table == self.identity_index)
        inv[where[:, 0]] = where[:, 1]
        if (inv < 0).any():
            raise ValueError("table has non-invertible elements")
        self.inverse = inv

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, element) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise ValueError(f"element not in group {self.name}: {element!r}") from None

    def resolve(self, items: Sequence) -> List[int]:
        """Indices for a mixed sequence of indices and element labels."""
        out = []
        for item in items:
            if isinstance(item, (int, np.integer)):
                i = int(item)
                if not 0 <= i < self.order:
                    raise ValueError(f"index {i} out of range for {self.name}")
                out.append(i)
            else:
                out.append(self.index_of(item))
        return out

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conjugates(self, gens: Sequence[int], by: Optional[Sequence[int]] = None) -> List[int]:
        """Sorted set {h^-1 s h : s in gens, h in by} (by defaults to all)."""
        by = range(self.order) if by is None else by
        out = set()
        for s in gens:
            for h in by:
                out.add(self.mul(self.mul(self.inv(h), s), h))
        return sorted(out)

    def power_set(self, gens: Sequence[int], m: int) -> List[int]:
        """Sorted set of all products of exactly m generators."""
        if m < 1:
            raise ValueError("m must be positive")
        current = set(gens)
        for _ in range(m - 1):
            current = {self.mul(a, s) for a in current for s in gens}
        return sorted(current)

    def closure(self, gens: Sequence[int]) -> List[int]:
        """Sorted subgroup generated by gens (with inverses)."""
        seed = set(gens) | {self.inv(g) for g in gens} | {self.identity_index}
        members = set(seed)
        frontier = list(seed)
        while frontier:
            nxt = []
            for a in frontier:
                for g in seed:
                    b = self.mul(a, g)
                    if b not in members:
                        members.add(b)
                        nxt.append(b)
            frontier = nxt
        return sorted(members)

    def subgroup(self, indices: Sequence[int], name: Optional[str] = None) -> "FiniteGroup":
        """The subgroup on the given (closed) index set, as its own group."""
        indices = sorted(set(indices))
        pos = {g: i for i, g in enumerate(indices)}
        table = np.empty((len(indices), len(indices)), dtype=np.int64)
        for i, a in enumerate(indices):
            for j, b in enumerate(indices):
                prod = self.mul(a, b)
                if prod not in pos:
                    raise ValueError("index set is not closed under multiplication")
                table[i, j] = pos[prod]
        return FiniteGroup(name or f"{self.name}-sub", [self.elements[g] for g in indices], table)

    def quotient(self, normal_indices: Sequence[int], name: Optional[str] = None) -> "FiniteGroup":
        """G / N for a normal subgroup N, with cosets as frozen index sets."""
        nset = sorted(set(normal_indices))
        if self.closure(nset) != nset:
            raise ValueError("normal candidate is not a subgroup")
        for g in range(self.order):
            conj = {self.mul(self.mul(self.inv(g), h), g) for h in nset}
            if conj != set(nset):
                raise ValueError("subgroup is not normal")
        coset_of = {}
        cosets: List[frozenset] = []
        for g in range(self.order):
            if g in coset_of:
                continue
            coset = frozenset(self.mul(g, h) for h in nset)
            for member in coset:
                coset_of[member] = len(cosets)
            cosets.append(coset)
        table = np.empty((len(cosets), len(cosets)), dtype=np.int64)
        for i, ca in enumerate(cosets):
            a = min(ca)
            for j, cb in enumerate(cosets):
                table[i, j] = coset_of[self.mul(a, min(cb))]
        return FiniteGroup(name or f"{self.name}-quot", cosets, table)

    def coset_image(self, quotient: "FiniteGroup", indices: Sequence[int]) -> List[int]:
        """Images of elements of self (by index) in a quotient built by
        `quotient()`: each quotient element is the frozenset containing it."""
        out = set()
        for g in indices:
            for qi, coset in enumerate(quotient.elements):
                if g in coset:
                    out.add(qi)
                    break
            else:
                raise ValueError(f"index {g} not covered by quotient cosets")
        return sorted(out)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


def from_elements(name: str, elements: Sequence, mul_fn: Callable) -> FiniteGroup:
    """Build the table for a complete element list and a multiplication rule."""
    if len(elements) > GROUP_ORDER_CAP:
        raise ValueError(f"group order {len(elements)} exceeds cap {GROUP_ORDER_CAP}")
    index = {el: i for i, el in enumerate(elements)}
    order = len(elements)
    table = np.empty((order, order), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            prod = mul_fn(a, b)
            if prod not in index:
                raise ValueError("element list is not closed under multiplication")
            table[i, j] = index[prod]
    return FiniteGroup(name, elements, table)


def generate(name: str, gens: Sequence, mul_fn: Callable, ident) -> FiniteGroup:
    """Close a generator list under multiplication and build the group."""
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = mul_fn(a, g)
                if b not in seen:
                    if len(seen) >= GROUP_ORDER_CAP:
                        raise ValueError(f"closure exceeds order cap {GROUP_ORDER_CAP}")
                    seen.add(b)
                    elements.append(b)
                    nxt.append(b)
        frontier = nxt
    return from_elements(name, elements, mul_fn)


def _tuple_compose(a: tuple, b: tuple) -> tuple:
    return tuple(a[i] for i in b)


def permutation_group(name: str, gens: Sequence[tuple]) -> FiniteGroup:
    """Group generated by permutations given as image tuples."""
    degree = len(gens[0])
    if any(len(g) != degree for g in gens):
        raise ValueError("generators have mixed degrees")
    group = generate(name, list(gens), _tuple_compose, tuple(range(degree)))
    group.generator_indices = group.resolve(list(gens))
    return group


def semidirect_group(n: int, p: int, name: Optional[str] = None) -> FiniteGroup:
    """The full semidirect product of the sum-zero vectors mod p by S_n,
    enumerated directly; generators are (1,-1,0,..) and the standard pair."""
    check_prime(p)
    if group_order(n, p) > GROUP_ORDER_CAP:
        raise ValueError(f"group order {group_order(n, p)} exceeds cap {GROUP_ORDER_CAP}")
    vec_rows = _all_sum_zero(n, p)
    elements = [
        GroupElement(FpVector(row, p), Permutation(np.array(images)))
        for row in vec_rows
        for images in itertools.permutations(range(n))
    ]
    group = from_elements(name or f"V0xS{n}_p{p}", elements, mul)
    gens = [GroupElement(unimaginative_vector(n, p), Permutation.identity(n))]
    zero = FpVector.zero(n, p)
    gens += [GroupElement(zero, t) for t in standard_generators(n)]
    group.generator_indices = group.resolve(gens)
    return group


def _all_sum_zero(n: int, p: int) -> List[Tuple[int, ...]]:
    rows = []
    for head in itertools.product(range(p), repeat=n - 1):
        rows.append(tuple(head) + (((-sum(head)) % p),))
    return rows


def semidirect_parts(group: FiniteGroup):
    """For a group built by `semidirect_group`: index sets of the vector part
    N, the permutation part H, and the generator split (vector generators,
    permutation generators)."""
    n_idx = [i for i, e in enumerate(group.elements) if e.perm.is_identity]
    h_idx = [i for i, e in enumerate(group.elements) if e.vec.is_zero]
    gens = group.generator_indices
    s_gens = [g for g in gens if group.elements[g].perm.is_identity]
    t_gens = [g for g in gens if group.elements[g].vec.is_zero and g not in s_gens]
    return n_idx, h_idx, s_gens, t_gens


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> tuple:
    """One permutation from 0-based cycle notation, e.g. '(0 1)(2 3)'."""
    cycles = []
    stripped = text.strip()
    if not stripped:
        raise ValueError("empty permutation")
    consumed = "".join(_CYCLE_RE.findall(stripped))
    leftover = _CYCLE_RE.sub("", stripped).strip()
    if leftover:
        raise ValueError(f"unparsable cycle notation: {text!r}")
    for body in _CYCLE_RE.findall(stripped):
        points = [int(tok) for tok in body.replace(",", " ").split()]
        if len(points) != len(set(points)) or any(x < 0 for x in points):
            raise ValueError(f"invalid cycle: ({body})")
        cycles.append(points)
    degree = max((max(c) for c in cycles if c), default=-1) + 1
    images = list(range(degree))
    for cycle in cycles:
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            images[a] = b
    return tuple(images)


@dataclass(frozen=True)
class CatalogEntry:
    """One catalog line: a named group plus its generating set."""

    name: str
    kind: str
    cycle_specs: tuple = ()
    n: int = 0
    p: int = 0

    def build(self) -> FiniteGroup:
        if self.kind == "perm":
            parsed = [parse_cycles(spec) for spec in self.cycle_specs]
            degree = max(len(g) for g in parsed)
            gens = [g + tuple(range(len(g), degree)) for g in parsed]
            return permutation_group(self.name, gens)
        if self.kind == "semidirect":
            return semidirect_group(self.n, self.p, name=self.name)
        raise ValueError(f"unknown catalog kind {self.kind!r}")


def parse_catalog(text: str) -> List[CatalogEntry]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            name, kind, payload = line.split(None, 2)
        except ValueError:
            raise ValueError(f"catalog line {lineno}: expected 'NAME KIND PAYLOAD'") from None
        if kind == "perm":
            specs = tuple(s.strip() for s in payload.split(";") if s.strip())
            if not specs:
                raise ValueError(f"catalog line {lineno}: no generators")
            entries.append(CatalogEntry(name=name, kind="perm", cycle_specs=specs))
        elif kind == "semidirect":
            parts = payload.split()
            if len(parts) != 2:
                raise ValueError(f"catalog line {lineno}: semidirect needs N and P")
            entries.append(CatalogEntry(name=name, kind="semidirect", n=int(parts[0]), p=int(parts[1])))
        else:
            raise ValueError(f"catalog line {lineno}: unknown kind {kind!r}")
    names = [e.name for e in entries]
    if len(names) != len(set(names)):
        raise ValueError("duplicate catalog names")
    return entries


def load_catalog(path: Optional[Path] = None) -> Dict[str, CatalogEntry]:
    """Entries of the shipped catalog, or of a user-supplied file."""
    if path is None:
        text = resources.files("expander_forge").joinpath("catalog.txt").read_text()
    else:
        text = Path(path).read_text()
    return {entry.name: entry for entry in parse_catalog(text)}
