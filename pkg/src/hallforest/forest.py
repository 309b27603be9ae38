"""Regular forests carved out of symmetric neighborhoods.

Pipeline: a symmetric entourage E on the positive integers (reflexive, with
finite explicitly-listable sections) is stripped of its diagonal, doubled
into a bipartite host, and fed to the incremental matcher. The resulting
match function f, with its cycle control, induces a d-regular forest whose
edges all lie within E composed with itself.

The forest step f* mostly follows f. Each f-cycle is broken between its
minimal element (the root of that tree) and the root's image; two infinite
rays of iterated least-transient-preimages, one anchored at the root and one
at the root's image, are rewired so the root escapes upward instead of
closing the cycle: even positions of the root ray climb two at a time, odd
positions descend, and the image ray descends throughout. Everything else
steps by f. Neighbor sets are {f*(x)} together with the d-1 points mapping
to x, and every x has a well-defined path to its root, which is what the
direction labeling downstream leans on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .graph import SymmetricDoubleGraph
from .hall import HallWitness
from .matcher import DEFAULT_RADIUS_CAP, HaremMatcher

SECTION_CACHE = 200_000


class Entourage:
    """A symmetric reflexive relation on positive integers with finite sections.

    section(v) lists everything related to v, v itself included, ascending.
    """

    def member(self, x: int, y: int) -> bool:
        return y in self.section(x)

    def section(self, v: int) -> tuple[int, ...]:
        raise NotImplementedError


class ExplicitEntourage(Entourage):
    def __init__(self, pairs: Iterable[tuple[int, int]], add_diagonal: bool = True):
        sections: dict[int, set[int]] = {}
        for x, y in pairs:
            sections.setdefault(x, set()).add(y)
            sections.setdefault(y, set()).add(x)
        if add_diagonal:
            for v in sections:
                sections[v].add(v)
        self._sections = {v: tuple(sorted(s)) for v, s in sections.items()}

    def member(self, x: int, y: int) -> bool:
        return y in self._sections.get(x, ())

    def section(self, v: int) -> tuple[int, ...]:
        return self._sections.get(v, (v,))


class TreeEntourage(Entourage):
    """Adjacency-plus-diagonal of the infinite r-regular tree.

    Vertices are numbered breadth-first: 1 is the root with children
    2..r+1, and every later vertex v has r-1 children packed contiguously,
    so parents and children are arithmetic in v. Every vertex sees exactly
    r tree neighbors.
    """

    def __init__(self, r: int):
        if r < 3:
            raise ValueError("regular tree degree must be at least 3")
        self.r = r

    def parent(self, v: int) -> int | None:
        if v == 1:
            return None
        if v <= self.r + 1:
            return 1
        return (v - self.r - 2) // (self.r - 1) + 2

    def children(self, v: int) -> tuple[int, ...]:
        r = self.r
        if v == 1:
            return tuple(range(2, r + 2))
        first = r + 2 + (v - 2) * (r - 1)
        return tuple(range(first, first + r - 1))

    def member(self, x: int, y: int) -> bool:
        return x == y or self.parent(x) == y or self.parent(y) == x

    def section(self, v: int) -> tuple[int, ...]:
        p = self.parent(v)
        around = (v,) + self.children(v) if p is None else (p, v) + self.children(v)
        return tuple(sorted(around))


def build_tree_entourage(r: int) -> TreeEntourage:
    return TreeEntourage(r)


class StrippedRelation:
    """The entourage minus its diagonal; sections no longer contain v."""

    def __init__(self, entourage: Entourage):
        self.entourage = entourage

    def member(self, x: int, y: int) -> bool:
        return x != y and self.entourage.member(x, y)

    def section(self, v: int) -> tuple[int, ...]:
        return tuple(w for w in self.entourage.section(v) if w != v)


def strip_diagonal(entourage: Entourage) -> StrippedRelation:
    return StrippedRelation(entourage)


def double_graph(entourage: Entourage, cache: int = SECTION_CACHE) -> SymmetricDoubleGraph:
    """Bipartite double of the diagonal-free part, with cached sections."""
    stripped = strip_diagonal(entourage)
    return SymmetricDoubleGraph(lru_cache(maxsize=cache)(stripped.section))


@dataclass(frozen=True)
class ExpansionCheck:
    ok: bool
    subset_size: int
    image_size: int
    required: int


def check_expansion(entourage: Entourage, subset: Iterable[int], factor: int) -> ExpansionCheck:
    """Does the entourage image of the subset reach factor times its size?"""
    f_set = sorted(set(subset))
    image: set[int] = set()
    for v in f_set:
        image.update(entourage.section(v))
    return ExpansionCheck(len(image) >= factor * len(f_set), len(f_set), len(image), factor * len(f_set))


@dataclass(frozen=True)
class Classification:
    """Where a point sits relative to its tree's rewired cycle.

    kind is one of: root (minimum of its f-cycle), image (the root's
    f-image on that cycle), cycle (other periodic points), root_ray /
    image_ray (on the ray of iterated least transient preimages anchored
    at the root / at its image, height = ray position >= 1), plain
    (everything else). root names the tree either way.
    """

    kind: str
    height: int
    root: int


@dataclass(frozen=True)
class RootInfo:
    root: int
    entry: int
    period: int
    steps_to_root: int


class ForestFunction:
    """The forest step f* and its neighbor structure over an entourage."""

    def __init__(
        self,
        entourage: Entourage,
        d: int,
        h: HallWitness | None = None,
        radius_cap: int = DEFAULT_RADIUS_CAP,
        step_limit: int | None = None,
    ):
        self.entourage = entourage
        self.stripped = strip_diagonal(entourage)
        self.d = d
        host = SymmetricDoubleGraph(lru_cache(maxsize=SECTION_CACHE)(self.stripped.section))
        self.matcher = HaremMatcher(
            host, d, h or HallWitness.identity(),
            radius_cap=radius_cap, step_limit=step_limit,
        )
        self._periodic: dict[int, bool] = {}
        self._ltp: dict[int, int] = {}
        self._class: dict[int, Classification] = {}
        self._star: dict[int, int] = {}

    # -- the underlying match function --------------------------------------

    def f(self, n: int) -> int:
        return self.matcher.f(n)

    def f_preimages(self, n: int) -> tuple[int, ...]:
        return self.matcher.preimages(n)

    def is_periodic(self, n: int) -> bool:
        """Whether n sits on an f-cycle; decidable within max(2, n) steps."""
        hit = self._periodic.get(n)
        if hit is not None:
            return hit
        x = n
        result = False
        for _ in range(max(2, n)):
            x = self.f(x)
            if x == n:
                result = True
                break
        self._periodic[n] = result
        return result

    def least_transient_preimage(self, n: int) -> int:
        """The least f-preimage of n that is not periodic."""
        hit = self._ltp.get(n)
        if hit is not None:
            return hit
        options = [p for p in self.f_preimages(n) if not self.is_periodic(p)]
        if not options:
            raise RuntimeError(f"{n} has no transient preimage; needs d >= 3")
        result = min(options)
        self._ltp[n] = result
        return result

    def find_root(self, n: int) -> RootInfo:
        """Walk n's f-orbit to its cycle; the root is the cycle minimum.

        Cycle control caps the walk: entry within 2n steps, period at most
        max(2, n). Violations raise rather than looping.
        """
        orbit = [n]
        index = {n: 0}
        x = n
        while True:
            x = self.f(x)
            if x in index:
                first = index[x]
                break
            index[x] = len(orbit)
            orbit.append(x)
        cycle = orbit[first:]
        root = min(cycle)
        period = len(cycle)
        if first > 2 * n or period > max(2, n):
            raise RuntimeError(
                f"cycle control broken at {n}: entry {first}, period {period}"
            )
        return RootInfo(root, first, period, orbit.index(root))

    # -- classification ------------------------------------------------------

    def classify(self, u: int) -> Classification:
        hit = self._class.get(u)
        if hit is not None:
            return hit
        orbit = [u]
        index = {u: 0}
        x = u
        while True:
            x = self.f(x)
            if x in index:
                first = index[x]
                break
            index[x] = len(orbit)
            orbit.append(x)
        cycle = orbit[first:]
        root = min(cycle)
        image = cycle[(cycle.index(root) + 1) % len(cycle)]
        for v in cycle:
            kind = "root" if v == root else ("image" if v == image else "cycle")
            self._class.setdefault(v, Classification(kind, 0, root))
        if first > 0:
            entry = orbit[first]
            # A transient point lies on a ray exactly when its walk enters
            # the cycle at that ray's anchor and every step of the walk was
            # the least transient preimage of the next.
            anchored = "root_ray" if entry == root else (
                "image_ray" if entry == image else None)
            broken = 0
            if anchored:
                for i in range(first, 0, -1):
                    if self.least_transient_preimage(orbit[i]) != orbit[i - 1]:
                        broken = i
                        break
            for i in range(first - 1, -1, -1):
                if anchored and i >= broken:
                    cls = Classification(anchored, first - i, root)
                else:
                    cls = Classification("plain", 0, root)
                self._class.setdefault(orbit[i], cls)
        return self._class[u]

    # -- the forest step -----------------------------------------------------

    def f_star(self, x: int) -> int:
        hit = self._star.get(x)
        if hit is not None:
            return hit
        info = self.classify(x)
        up = self.least_transient_preimage
        if info.kind == "root":
            result = up(up(x))
        elif info.kind == "root_ray" and info.height % 2 == 0:
            result = up(up(x))
        elif info.kind == "root_ray" and info.height >= 3:
            result = self.f(self.f(x))
        elif info.kind == "image_ray" and info.height >= 2:
            result = self.f(self.f(x))
        else:
            result = self.f(x)
        self._star[x] = result
        return result

    def f_star_path(self, x: int) -> tuple[int, ...]:
        """The one- or two-hop route realizing the forest step from x.

        Consecutive entries are always related by the diagonal-free part of
        the entourage, so a length-3 path certifies membership in the
        entourage composed with itself.
        """
        info = self.classify(x)
        up = self.least_transient_preimage
        if info.kind == "root" or (info.kind == "root_ray" and info.height % 2 == 0):
            mid = up(x)
            return (x, mid, up(mid))
        if (info.kind == "root_ray" and info.height >= 3) or (
                info.kind == "image_ray" and info.height >= 2):
            mid = self.f(x)
            return (x, mid, self.f(mid))
        return (x, self.f(x))

    def f_star_preimages(self, x: int) -> tuple[int, ...]:
        """All u with f*(u) = x; exactly d - 1 of them.

        Candidates are the f-preimages plus the single possible ray jump,
        which only exists when x itself is classified on a ray (or anchors
        one), so no climbing happens for plain points.
        """
        info = self.classify(x)
        cands = set(self.f_preimages(x))
        up = self.least_transient_preimage
        if info.kind == "root_ray" and info.height % 2 == 0:
            cands.add(self.f(self.f(x)))
        elif info.kind in ("root_ray", "image_ray", "image"):
            cands.add(up(up(x)))
        return tuple(sorted(u for u in cands if self.f_star(u) == x))

    def forest_neighbors(self, x: int) -> tuple[int, ...]:
        return tuple(sorted(self.f_star_preimages(x) + (self.f_star(x),)))

    # -- tree structure --------------------------------------------------------

    def parent(self, u: int) -> int | None:
        """The forest neighbor one step closer to u's root, None at the root."""
        info = self.classify(u)
        if info.kind == "root":
            return None
        if info.kind in ("cycle", "image", "plain"):
            return self.f(u)
        if info.height == 1:
            return self.f(u)
        return self.f(self.f(u))

    def path_to_root(self, u: int) -> list[int]:
        path = [u]
        while True:
            p = self.parent(path[-1])
            if p is None:
                return path
            path.append(p)

    def same_tree(self, x: int, y: int) -> bool:
        return self.find_root(x).root == self.find_root(y).root

    def ray_element(self, root: int, which: str, m: int) -> int:
        """m-th point of a ray by brute ascent; test and inspection helper."""
        if self.classify(root).kind != "root":
            raise ValueError(f"{root} is not a root")
        x = root if which == "root" else self.f(root)
        for _ in range(m):
            x = self.least_transient_preimage(x)
        return x

    def roots_up_to(self, n: int) -> tuple[int, ...]:
        return tuple(sorted({self.find_root(v).root for v in range(1, n + 1)}))


# -- verification ------------------------------------------------------------


@dataclass
class ForestReport:
    upto: int
    d: int
    preimage_upto: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_forest(forest: ForestFunction, upto: int, preimage_upto: int | None = None) -> ForestReport:
    """Check the forest invariants on 1..upto.

    Fixed-point freeness; acyclicity by certified escape (every f*-orbit
    reaches the strictly climbing part of a root ray without revisiting
    anything, after which heights only grow); every forest edge realized
    inside the entourage composed with itself; and d-1 preimages per point
    on a prefix.
    """
    pre_upto = preimage_upto if preimage_upto is not None else min(upto, 60)
    report = ForestReport(upto=upto, d=forest.d, preimage_upto=pre_upto)
    related = forest.stripped.member
    for n in range(1, upto + 1):
        if forest.f_star(n) == n:
            report.violations.append(f"forest step fixes {n}")
        hops = forest.f_star_path(n)
        for p, q in zip(hops, hops[1:]):
            if not related(p, q):
                report.violations.append(
                    f"hop {p}->{q} realizing the step at {n} leaves the entourage")
        seen = {n}
        x = n
        budget = max(3 * n, 40)
        for _ in range(budget):
            info = forest.classify(x)
            if info.kind == "root" or (info.kind == "root_ray" and info.height % 2 == 0):
                break  # from here the orbit climbs a ray, heights strictly grow
            x = forest.f_star(x)
            if x in seen:
                report.violations.append(f"forest orbit of {n} revisits {x}")
                break
            seen.add(x)
        else:
            report.violations.append(
                f"forest orbit of {n} shows no certified climb within {budget} steps")
    for n in range(1, pre_upto + 1):
        pre = forest.f_star_preimages(n)
        if len(pre) != forest.d - 1:
            report.violations.append(
                f"{n} has {len(pre)} forest preimages, expected {forest.d - 1}")
    return report


# -- serialization -------------------------------------------------------------


def forest_to_json(forest: ForestFunction, upto: int) -> str:
    edges = [[n, forest.f_star(n)] for n in range(1, upto + 1)]
    payload = {"edges": edges, "roots": list(forest.roots_up_to(upto))}
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def forest_to_dot(forest: ForestFunction, upto: int) -> str:
    roots = set(forest.roots_up_to(upto))
    lines = ["digraph forest {"]
    for n in sorted(roots):
        lines.append(f'  "{n}" [shape=doublecircle];')
    for n in range(1, upto + 1):
        lines.append(f'  "{n}" -> "{forest.f_star(n)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
