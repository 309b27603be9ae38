"""Pairs of bounded-displacement permutations acting freely.

A 4-regular forest supports four mutually inverse movement directions.
Every vertex names its neighbors a+, a-, b+ and b- in a way that is
consistent edge-wise: whoever you reach by a+ reaches you back by a-, and
likewise for the b pair. Directions are seeded at each tree's root
(ascending neighbors take a+, a-, b+, b- in that order) and propagate
downward: a child enters its parent's slot delta, so the child aims
inverse-of-delta back at the parent and hands its remaining neighbors,
ascending, the remaining directions in canonical order.

Following a+ everywhere defines a permutation alpha whose inverse is
following a-; same for beta with the b pair. Both move every point along a
forest edge, so displacement stays inside the entourage composed with
itself, and because the forest has no cycles, no nonempty reduced word over
{alpha, alpha-inverse, beta, beta-inverse} can fix a point: the pair acts
freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .forest import ForestFunction

DIRS = ("a+", "a-", "b+", "b-")
INVERSE = {"a+": "a-", "a-": "a+", "b+": "b-", "b-": "b+"}


class EdgeLabeling:
    """Per-vertex assignment of the four directions to forest neighbors."""

    def __init__(self, forest: ForestFunction):
        if forest.d != len(DIRS):
            raise ValueError(f"direction labeling needs a {len(DIRS)}-regular forest, got d={forest.d}")
        self.forest = forest
        self._dirs: dict[int, tuple[int, ...]] = {}

    def directions(self, v: int) -> tuple[int, ...]:
        """Neighbors of v in DIRS order (a+, a-, b+, b-)."""
        memo = self._dirs
        if v in memo:
            return memo[v]
        path = self.forest.path_to_root(v)
        known = len(path) - 1
        for j, u in enumerate(path):
            if u in memo:
                known = j
                break
        else:
            root = path[-1]
            nbrs = self.forest.forest_neighbors(root)
            memo[root] = nbrs  # ascending neighbors take DIRS in order
        for j in range(known, 0, -1):
            self._assign(path[j], path[j - 1])
        return memo[v]

    def _assign(self, parent: int, child: int) -> None:
        if child in self._dirs:
            return
        pdirs = self._dirs[parent]
        back = INVERSE[DIRS[pdirs.index(child)]]
        others = [w for w in self.forest.forest_neighbors(child) if w != parent]
        slots = {back: parent}
        for name, w in zip((x for x in DIRS if x != back), others):
            slots[name] = w
        self._dirs[child] = tuple(slots[x] for x in DIRS)

    def direction_of(self, v: int, w: int) -> str:
        """Which direction leads from v to its neighbor w."""
        return DIRS[self.directions(v).index(w)]


class WobblingPair:
    """Two permutations alpha and beta read off a direction labeling."""

    def __init__(self, labeling: EdgeLabeling):
        self.labeling = labeling
        self.forest = labeling.forest

    def alpha(self, n: int) -> int:
        return self.labeling.directions(n)[0]

    def alpha_inv(self, n: int) -> int:
        return self.labeling.directions(n)[1]

    def beta(self, n: int) -> int:
        return self.labeling.directions(n)[2]

    def beta_inv(self, n: int) -> int:
        return self.labeling.directions(n)[3]

    def move(self, token: str, n: int) -> int:
        return self.labeling.directions(n)[DIRS.index(token)]

    def apply_word(self, word: tuple[str, ...], n: int) -> int:
        """Compose left to right: the rightmost token acts first."""
        for token in reversed(word):
            n = self.move(token, n)
        return n


def ordered_forest_neighbors(forest: ForestFunction, n: int) -> tuple[int, int, int, int]:
    """The four forest neighbors of n, ascending; errors off 4-regularity."""
    nbrs = forest.forest_neighbors(n)
    if len(nbrs) != 4:
        raise ValueError(f"{n} has {len(nbrs)} forest neighbors, expected 4")
    return nbrs


def build_labeling(forest: ForestFunction) -> EdgeLabeling:
    return EdgeLabeling(forest)


def build_wobbling_pair(forest: ForestFunction) -> WobblingPair:
    return WobblingPair(EdgeLabeling(forest))


def reduced_words(length: int) -> list[tuple[str, ...]]:
    """All reduced words of exactly the given length, in canonical order.

    Canonical order ranks tokens a+, a-, b+, b- and extends words on the
    right; reduced means no token directly follows its inverse.
    """
    words: list[tuple[str, ...]] = [()]
    for _ in range(length):
        words = [w + (t,) for w in words for t in DIRS
                 if not (w and t == INVERSE[w[-1]])]
    return words


@dataclass
class WobblingReport:
    upto: int
    word_len: int
    words_checked: int = 0
    points_checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_free_semiregular(pair: WobblingPair, word_len: int, upto: int) -> WobblingReport:
    """Inverse consistency, edge displacement, and freeness on a range.

    Freeness is tested exhaustively: every nonempty reduced word of length
    at most word_len must move every point in 1..upto. Words are tried in
    canonical order and points ascending, so any failure (or budget
    exhaustion in the underlying matcher) happens at a reproducible spot.
    """
    report = WobblingReport(upto=upto, word_len=word_len)
    forest = pair.forest
    related = forest.stripped.member
    for n in range(1, upto + 1):
        if pair.alpha_inv(pair.alpha(n)) != n or pair.alpha(pair.alpha_inv(n)) != n:
            report.violations.append(f"alpha is not inverted by alpha_inv at {n}")
        if pair.beta_inv(pair.beta(n)) != n or pair.beta(pair.beta_inv(n)) != n:
            report.violations.append(f"beta is not inverted by beta_inv at {n}")
        for token in ("a+", "b+"):
            w = pair.move(token, n)
            if w not in forest.forest_neighbors(n):
                report.violations.append(f"{token} at {n} leaves the forest")
                continue
            # each forest edge is one or two entourage hops; find them from
            # whichever endpoint the forest step maps across the edge
            hops = None
            if forest.f_star(n) == w:
                hops = forest.f_star_path(n)
            elif forest.f_star(w) == n:
                hops = forest.f_star_path(w)
            if hops is None:
                report.violations.append(f"edge {n}-{w} is not a forest step either way")
            else:
                for p, q in zip(hops, hops[1:]):
                    if not related(p, q):
                        report.violations.append(f"hop {p}->{q} of edge {n}-{w} leaves the entourage")
    for length in range(1, word_len + 1):
        for word in reduced_words(length):
            report.words_checked += 1
            for n in range(1, upto + 1):
                report.points_checked += 1
                if pair.apply_word(word, n) == n:
                    report.violations.append(
                        f"reduced word {''.join(word)} fixes {n}")
    return report


def wobble_to_json(pair: WobblingPair, upto: int) -> str:
    payload = {
        str(n): list(pair.labeling.directions(n)) for n in range(1, upto + 1)
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def wobble_to_dot(pair: WobblingPair, upto: int) -> str:
    lines = ["digraph wobbling {"]
    for n in range(1, upto + 1):
        lines.append(f'  "{n}" -> "{pair.alpha(n)}" [label="a"];')
    for n in range(1, upto + 1):
        lines.append(f'  "{n}" -> "{pair.beta(n)}" [label="b"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
