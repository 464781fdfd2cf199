"""Finite groups as Cayley tables, and constructive splitting of left-split exact sequences.

Given ``1 -> K -a-> S -b-> U -> 1`` and a retraction ``g: S -> K`` with
``g a = id``, the map ``s -> (g(s), b(s))`` is an isomorphism ``S -> K x U``.
:func:`direct_product_from_left_split` builds it and checks it by
exhaustion; :func:`retractions` searches every homomorphism ``S -> K`` so
the absence of a retraction can be proved as well.

Elements are the indices ``0..n-1``; ``labels`` only matter for printing.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import InvalidGroup, NotExact, RetractionInvalid, UnicoverError

MAX_ORDER = 10_000


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    labels: tuple = ()
    declared_generators: tuple[int, ...] = ()
    name: str = "G"
    identity: int = field(init=False)
    inverses: np.ndarray = field(init=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        n = table.shape[0] if table.ndim == 2 else -1
        if table.ndim != 2 or table.shape != (n, n) or n < 1:
            raise InvalidGroup("multiplication table must be a non-empty square array")
        if n > MAX_ORDER:
            raise InvalidGroup(f"groups are capped at {MAX_ORDER} elements for exhaustive checks")
        if table.min() < 0 or table.max() >= n:
            raise InvalidGroup("table entries must be element indices")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        labels = tuple(self.labels) if self.labels else tuple(range(n))
        if len(labels) != n:
            raise InvalidGroup("one label per element is required")
        object.__setattr__(self, "labels", labels)

        idx = np.arange(n)
        ids = [e for e in range(n) if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx)]
        if not ids:
            raise InvalidGroup("no identity element")
        e = ids[0]
        inverses = np.full(n, -1)
        for a in range(n):
            hits = np.nonzero(table[a] == e)[0]
            if hits.size != 1 or table[hits[0], a] != e:
                raise InvalidGroup(f"element {labels[a]} has no two-sided inverse")
            inverses[a] = hits[0]
        for a in range(n):
            # (a b) c == a (b c) for all b, c
            if not np.array_equal(table[table[a]], table[a][table]):
                raise InvalidGroup("multiplication is not associative")
        inverses.setflags(write=False)
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverses", inverses)
        for g in self.declared_generators:
            if not 0 <= g < n:
                raise InvalidGroup("declared generator out of range")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def index(self, label: Hashable) -> int:
        return self.labels.index(label)

    def generated_by(self, gens: Sequence[int]) -> list[int]:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = int(self.table[x, g])
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def generators(self) -> tuple[int, ...]:
        """Declared generators, or a greedy generating set."""
        if self.declared_generators and len(self.generated_by(self.declared_generators)) == self.order:
            return self.declared_generators
        gens: list[int] = []
        span = {self.identity}
        # elements of large order first keeps the set short
        for a in sorted(range(self.order), key=lambda a: -self.element_order(a)):
            if a not in span:
                gens.append(a)
                span = set(self.generated_by(gens))
                if len(span) == self.order:
                    break
        return tuple(gens)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = int(self.table[x, a])
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1), dtype=int), ("e",), name="1")


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, tuple(range(n)), (1 % n,), name=f"Z{n}")


def permutation_group(generators: Sequence[Sequence[int]], name: str = "G") -> FiniteGroup:
    """Closure of permutations (image lists on ``0..d-1``) under composition.

    Elements are numbered in breadth-first order from the identity, trying
    generators in the given order; ``(p q)(x) = p(q(x))``.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        raise InvalidGroup("at least one generating permutation is required")
    d = len(gens[0])
    for g in gens:
        if len(g) != d or sorted(g) != list(range(d)):
            raise InvalidGroup(f"{list(g)} is not a permutation of 0..{d - 1}")
    ident = tuple(range(d))
    elems = [ident]
    where = {ident: 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(x[g[i]] for i in range(d))
            if y not in where:
                if len(elems) >= MAX_ORDER:
                    raise InvalidGroup(f"generated group exceeds {MAX_ORDER} elements")
                where[y] = len(elems)
                elems.append(y)
                queue.append(y)
    n = len(elems)
    perms = np.array(elems)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            table[a, b] = where[tuple(perms[a][perms[b]])]
    return FiniteGroup(table, tuple(elems), tuple(where[g] for g in gens), name=name)


def symmetric_group(d: int) -> FiniteGroup:
    if d < 2:
        return permutation_group([list(range(max(d, 1)))], name=f"S{d}")
    swap = [1, 0] + list(range(2, d))
    cycle = list(range(1, d)) + [0]
    return permutation_group([swap, cycle], name=f"S{d}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """``G x H`` with element ``(a, b)`` at index ``a * |H| + b``."""
    m = h.order
    a = np.arange(g.order * m)
    ga, hb = a // m, a % m
    table = g.table[ga[:, None], ga[None, :]] * m + h.table[hb[:, None], hb[None, :]]
    labels = tuple((g.labels[i], h.labels[j]) for i, j in zip(ga, hb))
    return FiniteGroup(table, labels, name=f"{g.name}x{h.name}")


@dataclass(frozen=True, eq=False)
class GroupHom:
    domain: FiniteGroup
    codomain: FiniteGroup
    images: np.ndarray

    def __post_init__(self):
        images = np.array(self.images, dtype=np.int64)
        if images.shape != (self.domain.order,):
            raise InvalidGroup("a homomorphism needs one image per domain element")
        if images.min() < 0 or images.max() >= self.codomain.order:
            raise InvalidGroup("image index out of range")
        images.setflags(write=False)
        object.__setattr__(self, "images", images)
        # f(ab) == f(a) f(b) for all pairs
        lhs = images[self.domain.table]
        rhs = self.codomain.table[images[:, None], images[None, :]]
        if not np.array_equal(lhs, rhs):
            raise InvalidGroup("map is not a homomorphism")

    def __call__(self, a: int) -> int:
        return int(self.images[a])

    def kernel(self) -> list[int]:
        return [int(a) for a in np.nonzero(self.images == self.codomain.identity)[0]]

    def image(self) -> list[int]:
        return sorted(set(int(a) for a in self.images))

    def is_injective(self) -> bool:
        return len(set(self.images.tolist())) == self.domain.order

    def is_surjective(self) -> bool:
        return len(self.image()) == self.codomain.order

    def then(self, other: "GroupHom") -> "GroupHom":
        """``other o self``."""
        if other.domain is not self.codomain:
            raise InvalidGroup("composition needs matching groups")
        return GroupHom(self.domain, other.codomain, other.images[self.images])

    def is_identity(self) -> bool:
        return self.domain is self.codomain and np.array_equal(self.images, np.arange(self.domain.order))


def hom_from_generators(domain: FiniteGroup, codomain: FiniteGroup, gen_images: Sequence[int],
                        gens: Sequence[int] | None = None) -> GroupHom | None:
    """Extend generator images along the Cayley graph; ``None`` if inconsistent."""
    gens = tuple(domain.generators() if gens is None else gens)
    if len(gen_images) != len(gens):
        raise InvalidGroup("one image per generator is required")
    img = np.full(domain.order, -1)
    img[domain.identity] = codomain.identity
    queue = deque([domain.identity])
    while queue:
        x = queue.popleft()
        for g, h in zip(gens, gen_images):
            y = int(domain.table[x, g])
            val = int(codomain.table[img[x], h])
            if img[y] < 0:
                img[y] = val
                queue.append(y)
            elif img[y] != val:
                return None
    if np.any(img < 0):
        raise InvalidGroup("generators do not generate the domain")
    return GroupHom(domain, codomain, img)


def homomorphisms(domain: FiniteGroup, codomain: FiniteGroup):
    """Every homomorphism ``domain -> codomain``, by exhaustion over generator images."""
    gens = domain.generators()
    # a generator of order m must go to an element whose order divides m
    choices = []
    for g in gens:
        m = domain.element_order(g)
        choices.append([h for h in range(codomain.order) if m % codomain.element_order(h) == 0])
    for assignment in itertools.product(*choices):
        f = hom_from_generators(domain, codomain, assignment, gens)
        if f is not None:
            yield f


@dataclass(frozen=True, eq=False)
class FiniteGroupSES:
    alpha: GroupHom
    beta: GroupHom

    def __post_init__(self):
        if self.alpha.codomain is not self.beta.domain:
            raise NotExact("alpha must land in the domain of beta")
        if not self.alpha.is_injective():
            raise NotExact("alpha is not injective")
        if not self.beta.is_surjective():
            raise NotExact("beta is not surjective")
        if self.alpha.image() != self.beta.kernel():
            raise NotExact("image(alpha) differs from kernel(beta)")

    @property
    def K(self) -> FiniteGroup:
        return self.alpha.domain

    @property
    def S(self) -> FiniteGroup:
        return self.alpha.codomain

    @property
    def U(self) -> FiniteGroup:
        return self.beta.codomain


def is_retraction(ses: FiniteGroupSES, gamma: GroupHom) -> bool:
    return gamma.domain is ses.S and gamma.codomain is ses.K and ses.alpha.then(gamma).is_identity()


def retractions(ses: FiniteGroupSES) -> list[GroupHom]:
    """All ``gamma: S -> K`` with ``gamma o alpha = id``, found exhaustively."""
    return [g for g in homomorphisms(ses.S, ses.K) if ses.alpha.then(g).is_identity()]


@dataclass(frozen=True, eq=False)
class LeftSplit:
    iso: GroupHom  # S -> K x U
    kernel_iso: dict[int, int]  # beta restricted to ker(gamma): ker(gamma) -> U

    @property
    def product(self) -> FiniteGroup:
        return self.iso.codomain


def direct_product_from_left_split(ses: FiniteGroupSES, gamma: GroupHom) -> LeftSplit:
    """``s -> (gamma(s), beta(s))``, checked to be a bijective homomorphism."""
    if gamma.domain is not ses.S or gamma.codomain is not ses.K:
        raise RetractionInvalid("gamma must map S to K")
    if not ses.alpha.then(gamma).is_identity():
        raise RetractionInvalid("gamma o alpha is not the identity of K")
    prod = direct_product(ses.K, ses.U)
    images = gamma.images * ses.U.order + ses.beta.images
    iso = GroupHom(ses.S, prod, images)
    if not (iso.is_injective() and iso.is_surjective()):
        raise UnicoverError("s -> (gamma(s), beta(s)) is not a bijection")
    ker = gamma.kernel()
    kernel_iso = {s: ses.beta(s) for s in ker}
    if sorted(kernel_iso.values()) != list(range(ses.U.order)):
        raise UnicoverError("beta restricted to ker(gamma) is not a bijection onto U")
    return LeftSplit(iso, kernel_iso)
