"""Incremental perfect (1, d-1)-matching with cycle control.

The construction consumes a symmetric, diagonal-free bipartite host (both
sides copies of the positive integers, adjacency symmetric in the numbers,
never relating a number to itself) and retires vertices step by step:

  part 1   the least live A-vertex commits to d-1 partners, taken from a
           relaxed (1, d)-matching on a small ball around it, or from the
           fan reserved for it earlier;
  part 2   if the B-copy of that vertex is still free, a short chain of
           forced commitments closes a 2-cycle through it, consuming
           reserved fans it runs into and creating at most one new fan.

The partner map induces f(n) = the A-vertex matched to b_n. Keeping every
removed A-number's B-copy removed within the same step preserves the
mirror-edge property of the remaining host, which is what keeps the forced
chain edges available; the chain discipline keeps f's cycles short and
anchored: f(f(1)) = 1, minimal periods never exceed the vertex number, and
every orbit parks on a cycle within explicit bounds.

State lives in flat arrays (b-number -> owning a, a-number -> d-1 partner
slots) so prefixes with millions of steps stay affordable.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass, field
from typing import Callable

from .graph import BipartiteGraph, step_radius
from .hall import HallWitness, solve_relaxed

DEFAULT_RADIUS_CAP = 3


class MatcherBudgetError(RuntimeError):
    """The step budget ran out before the requested vertex was settled."""


def shift_witness(h: HallWitness, c: int) -> HallWitness:
    """Reindexed witness n -> h(n + c) for n > 0, pinned to 0 at 0."""
    return h.shift(c)


def cumulative_shift(d: int, step: int) -> int:
    """Total witness shift after the given number of completed steps.

    The first step costs d - 1 (one A-vertex retires against d - 1 fresh
    partners), every later step costs 2d.
    """
    if step <= 0:
        return 0
    return (d - 1) + 2 * d * (step - 1)


class HaremMatcher:
    """Stateful constructor of the perfect (1, d-1)-matching.

    graph must be symmetric and diagonal-free in the sense of
    SymmetricDoubleGraph; h is the original witness (kept unshifted for the
    radius schedule); d >= 3. radius_cap truncates the radius schedule:
    balls are solved at min(schedule, radius_cap), bumped up to the next odd
    value, which is sound because a relaxed matching on a larger ball
    restricts to one on a smaller odd-radius ball. step_limit, when set,
    bounds run_step calls made on behalf of lazy queries; exceeding it
    raises MatcherBudgetError instead of grinding on.
    """

    def __init__(
        self,
        graph: BipartiteGraph,
        d: int,
        h: HallWitness,
        radius_cap: int = DEFAULT_RADIUS_CAP,
        step_limit: int | None = None,
        check: bool = False,
    ):
        if d < 3:
            raise ValueError("d must be at least 3")
        if h(0) != 0:
            raise ValueError("witness must satisfy h(0) = 0")
        if radius_cap < 3:
            raise ValueError("radius_cap must be at least 3")
        self.graph = graph
        self.d = d
        self.h_original = h
        self.radius_cap = radius_cap
        self.step_limit = step_limit
        self.check = check
        self.step = 0
        self._cursor = 1  # least A-number that may still be live
        # owner[b] = a once b_b is matched to a_a, else 0; index 0 unused
        self._owner = array("i", [0, 0])
        # parts[a*(d-1) ... a*(d-1)+d-2] = partners of a_a once retired, else zeros
        self._parts = array("i", [0] * (2 * (d - 1)))
        self._fans: dict[int, tuple[int, ...]] = {}
        self._leaf_root: dict[int, int] = {}
        self._sanity_check_host()

    # -- plumbing ---------------------------------------------------------

    def _sanity_check_host(self) -> None:
        g = self.graph
        probe = max(1, self.h_original(1))
        for v in range(1, 13):
            if g.adjacent(v, v):
                raise ValueError(f"host relates {v} to itself; a diagonal-free host is required")
        for v in range(1, 7):
            for w in range(1, 7):
                if g.adjacent(v, w) != g.adjacent(w, v):
                    raise ValueError("host adjacency is not symmetric in the numbers")
        # Cheap necessary piece of the counting hypothesis: singletons must
        # clear d partners plus the slack the witness promises at size 1.
        slack = 1 if probe <= 1 else 0
        for v in range(1, 7):
            if g.degree_a(v) < self.d + slack:
                raise ValueError(
                    f"A-vertex {v} has degree {g.degree_a(v)} < {self.d + slack}; "
                    "host cannot satisfy the counting hypothesis"
                )

    def _grow_owner(self, n: int) -> None:
        if n >= len(self._owner):
            self._owner.extend([0] * (max(n + 1, 2 * len(self._owner)) - len(self._owner)))

    def _grow_parts(self, a: int) -> None:
        need = (a + 1) * (self.d - 1)
        if need > len(self._parts):
            target = max(need, 2 * len(self._parts))
            self._parts.extend([0] * (target - len(self._parts)))

    def owner_of(self, b: int) -> int:
        """The A-number matched to b_b so far, 0 if not yet matched."""
        return self._owner[b] if b < len(self._owner) else 0

    def partners_of(self, a: int) -> tuple[int, ...]:
        """Committed partners of a_a so far (empty or exactly d-1 numbers)."""
        base = a * (self.d - 1)
        if base + self.d - 1 > len(self._parts) or self._parts[base] == 0:
            return ()
        return tuple(self._parts[base:base + self.d - 1])

    def a_removed(self, a: int) -> bool:
        base = a * (self.d - 1)
        return base < len(self._parts) and self._parts[base] != 0

    def b_removed(self, b: int) -> bool:
        return self.owner_of(b) != 0

    def removed_a_set(self) -> frozenset[int]:
        d1 = self.d - 1
        return frozenset(a for a in range(1, len(self._parts) // d1) if self._parts[a * d1] != 0)

    def removed_b_set(self) -> frozenset[int]:
        return frozenset(b for b in range(1, len(self._owner)) if self._owner[b] != 0)

    def fans(self) -> dict[int, tuple[int, ...]]:
        return dict(self._fans)

    @property
    def witness(self) -> HallWitness:
        """The witness currently carried by the remaining host."""
        return self.h_original.shift(cumulative_shift(self.d, self.step))

    def effective_radius(self, n: int) -> int:
        r = min(step_radius(self.h_original, self.d, n), self.radius_cap)
        return r + 1 if r % 2 == 0 else r

    # -- committing -------------------------------------------------------

    def _commit(self, a: int, bs: tuple[int, ...]) -> None:
        d1 = self.d - 1
        if self.check:
            assert len(bs) == d1 and len(set(bs)) == d1, (a, bs)
            assert not self.a_removed(a), a
            for b in bs:
                assert not self.b_removed(b) and b not in self._leaf_root, (a, b)
                assert self.graph.adjacent(a, b), (a, b)
        self._grow_parts(a)
        base = a * d1
        for i, b in enumerate(sorted(bs)):
            self._parts[base + i] = b
            self._grow_owner(b)
            self._owner[b] = a

    # -- ball solving -----------------------------------------------------

    def _live_b(self, b: int) -> bool:
        return self.owner_of(b) == 0 and b not in self._leaf_root

    def _live_a(self, a: int) -> bool:
        return not self.a_removed(a) and a not in self._fans

    def _ball_parts(self, center: int) -> tuple[dict[int, list[int]], dict[int, int]]:
        """Relaxed (1, d)-matching on the ball around a live, unreserved center.

        The ball lives in the current remaining host minus all fan roots and
        fan leaves. Returns (partners per ball A-vertex, owner of each
        interior B-vertex).
        """
        radius = self.effective_radius(self.step)
        if radius == 3:
            section = self.graph.neighbors_a
            interior = [b for b in section(center) if self.owner_of(b) == 0 and b not in self._leaf_root]
            a_seen = {center}
            for b in interior:
                for a in section(b):
                    if a not in a_seen and self._live_a(a):
                        a_seen.add(a)
            a_order = sorted(a_seen)
            nbrs: dict[int, list[int]] = {}
            for a in a_order:
                nbrs[a] = [b for b in section(a) if self.owner_of(b) == 0 and b not in self._leaf_root]
        else:
            a_order, nbrs, interior = self._ball_layers(center, radius)
        parts = solve_relaxed(a_order, nbrs, interior, self.d)
        owner = {b: a for a, bs in parts.items() for b in bs}
        return parts, owner

    def _ball_layers(self, center: int, radius: int):
        # Generic odd-radius ball in the starred remaining host. Interior
        # B-vertices are those strictly inside the cut; every A-vertex keeps
        # its full live section as candidates (sections of A-vertices at
        # distance < radius stay inside the ball).
        is_live_b = self._live_b
        dist_a = {center: 0}
        dist_b: dict[int, int] = {}
        frontier_a = [center]
        for r in range(1, radius, 2):
            layer_b = []
            for a in frontier_a:
                for b in self.graph.neighbors_a(a):
                    if b not in dist_b and is_live_b(b):
                        dist_b[b] = r
                        layer_b.append(b)
            frontier_a = []
            if r + 1 < radius:
                for b in layer_b:
                    for a in self.graph.neighbors_b(b):
                        if a not in dist_a and self._live_a(a):
                            dist_a[a] = r + 1
                            frontier_a.append(a)
        a_order = sorted(dist_a)
        nbrs = {a: [b for b in self.graph.neighbors_a(a) if is_live_b(b)] for a in a_order}
        interior = [b for b, r in dist_b.items() if r < radius]
        return a_order, nbrs, interior

    # -- stepping ---------------------------------------------------------

    def run_step(self) -> None:
        """Retire the least live A-vertex and close its 2-cycle if possible."""
        d1 = self.d - 1
        while self.a_removed(self._cursor):
            self._cursor += 1
        an = self._cursor
        if an in self._fans:
            leaves = self._fans.pop(an)
            for b in leaves:
                del self._leaf_root[b]
            self._commit(an, leaves)
            least = leaves[0]
        else:
            parts, _ = self._ball_parts(an)
            mine = parts[an]  # sorted, length d
            self._commit(an, tuple(mine[:d1]))
            least = mine[0]
        if self.owner_of(an) == 0:
            self._close_cycle(an, least)
        self.step += 1

    def _close_cycle(self, target: int, center: int) -> None:
        """Forced-commitment chain giving b_target a partner.

        target is the B-copy (by number) of an A-vertex that was just
        retired; center is the A-copy of its least new partner, which is
        always live because its own B-copy was consumed in the same breath.
        Every iteration commits the current target; case analysis on where
        the target sits decides how, and whether the chain continues.
        """
        d = self.d
        for _ in range(len(self._fans) + 2):
            if target in self._leaf_root:
                # The target is reserved as a fan leaf: consume that fan
                # whole, then keep going with its root in the target seat.
                root = self._leaf_root[target]
                leaves = self._fans.pop(root)
                for b in leaves:
                    del self._leaf_root[b]
                self._commit(root, leaves)
                if self.owner_of(root) != 0:
                    return
                center = min(b for b in leaves if b != target)
                target = root
                continue
            if center in self._fans:
                # The center is itself a live fan root: pair it with the
                # target plus its lowest leaves, releasing the highest leaf.
                leaves = self._fans.pop(center)
                for b in leaves:
                    del self._leaf_root[b]
                self._commit(center, tuple(sorted((target,) + leaves[:d - 2])))
                return
            parts, owner = self._ball_parts(center)
            holder = owner[target]  # target sits one edge from the center
            mine = parts[center]
            if holder == center:
                # The ball matching already pairs center with target: keep
                # the target, drop one surplus partner.
                if target != mine[-1]:
                    self._commit(center, tuple(mine[:d - 1]))
                else:
                    self._commit(center, tuple(mine[1:]))
                return
            # Force the edge instead; the holder keeps its remaining ball
            # partners as a reserved fan for a later step.
            self._commit(center, tuple(sorted([target] + mine[:d - 2])))
            fan = tuple(b for b in parts[holder] if b != target)
            self._fans[holder] = fan
            for b in fan:
                self._leaf_root[b] = holder
            return
        raise RuntimeError("forced chain failed to terminate within the fan budget")

    def advance_to_step(self, n: int) -> None:
        while self.step < n:
            self._spend()
            self.run_step()

    def _spend(self) -> None:
        if self.step_limit is not None and self.step >= self.step_limit:
            raise MatcherBudgetError(
                f"step budget {self.step_limit} exhausted at step {self.step}"
            )

    # -- the match function ------------------------------------------------

    def f(self, n: int) -> int:
        """The A-number matched to b_n, running steps on demand.

        b_n is settled no later than step n; a clean progress bound, so a
        violation raises instead of looping.
        """
        if n < 1:
            raise ValueError("vertices are positive")
        while self.owner_of(n) == 0:
            if self.step > n:
                raise RuntimeError(f"progress bound broken: b_{n} unmatched after step {self.step}")
            self._spend()
            self.run_step()
        return self._owner[n]

    def preimages(self, a: int) -> tuple[int, ...]:
        """All n with f(n) = a: the d-1 committed partners of a_a."""
        if a < 1:
            raise ValueError("vertices are positive")
        while not self.a_removed(a):
            if self.step > a:
                raise RuntimeError(f"progress bound broken: a_{a} live after step {self.step}")
            self._spend()
            self.run_step()
        return self.partners_of(a)

    def ensure_prefix(self, n: int) -> None:
        """Settle f on all of 1..n."""
        for v in range(1, n + 1):
            self.f(v)

    # -- checkpointing ------------------------------------------------------

    def checkpoint(self) -> dict:
        committed = sorted(
            (self._owner[b], b) for b in range(1, len(self._owner)) if self._owner[b] != 0
        )
        return {
            "d": self.d,
            "step": self.step,
            "committed": [[a, b] for a, b in committed],
            "removed_a": sorted(self.removed_a_set()),
            "removed_b": sorted(self.removed_b_set()),
            "fans": [
                {"root": root, "leaves": list(self._fans[root])}
                for root in sorted(self._fans)
            ],
        }

    def checkpoint_json(self) -> str:
        return json.dumps(self.checkpoint(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def restore(
        cls,
        graph: BipartiteGraph,
        h: HallWitness,
        checkpoint: dict,
        radius_cap: int = DEFAULT_RADIUS_CAP,
        step_limit: int | None = None,
        check: bool = False,
    ) -> "HaremMatcher":
        m = cls(graph, checkpoint["d"], h, radius_cap=radius_cap,
                step_limit=step_limit, check=check)
        grouped: dict[int, list[int]] = {}
        for a, b in checkpoint["committed"]:
            grouped.setdefault(a, []).append(b)
        for a, bs in grouped.items():
            if len(bs) != m.d - 1:
                raise ValueError(f"corrupt checkpoint: a_{a} holds {len(bs)} partners")
            m._commit(a, tuple(bs))
        if sorted(grouped) != list(checkpoint["removed_a"]):
            raise ValueError("corrupt checkpoint: removed_a disagrees with committed pairs")
        want_b = sorted(b for bs in grouped.values() for b in bs)
        if want_b != list(checkpoint["removed_b"]):
            raise ValueError("corrupt checkpoint: removed_b disagrees with committed pairs")
        for fan in checkpoint["fans"]:
            root, leaves = fan["root"], tuple(fan["leaves"])
            m._fans[root] = leaves
            for b in leaves:
                m._leaf_root[b] = root
        m.step = checkpoint["step"]
        while m.a_removed(m._cursor):
            m._cursor += 1
        return m


class MatchFunction:
    """Read-only functional view of a matcher: f, preimages, prefix barriers."""

    def __init__(self, matcher: HaremMatcher):
        self.matcher = matcher
        self.d = matcher.d

    def __call__(self, n: int) -> int:
        return self.matcher.f(n)

    def preimages(self, a: int) -> tuple[int, ...]:
        return self.matcher.preimages(a)

    def iterate(self, n: int, k: int) -> int:
        for _ in range(k):
            n = self.matcher.f(n)
        return n


@dataclass
class CycleControlReport:
    """Outcome of verify_cycle_control.

    periodic maps each periodic start to its minimal period; transient maps
    each non-periodic start to (k, l) with f^(k+l)(n) = f^k(n), k minimal.
    sharp_entry notes whether every k stayed at or below 2n - 1 (a tighter
    bound than asserted; reported, not enforced).
    """

    upto: int
    periodic: dict[int, int] = field(default_factory=dict)
    transient: dict[int, tuple[int, int]] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    sharp_entry: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_cycle_control(f: MatchFunction | Callable[[int], int], upto: int) -> CycleControlReport:
    """Walk every orbit with start 2..upto and check the cycle bounds.

    Periodic starts must return within max(2, n) iterations (minimal period
    at most n for n >= 2); non-periodic starts must repeat a value f^k(n) =
    f^(k+l)(n) with k <= 2n and l <= n.
    """
    report = CycleControlReport(upto=upto)
    fn = f
    for n in range(2, upto + 1):
        seen = {n: 0}
        x = n
        hit = None
        for i in range(1, 3 * n + 3):
            x = fn(x)
            if x in seen:
                hit = (seen[x], i)
                break
            seen[x] = i
        if hit is None:
            report.violations.append(f"orbit of {n} shows no repeat within {3 * n + 2} iterations")
            continue
        first, again = hit
        if first == 0:
            period = again
            report.periodic[n] = period
            if period > max(2, n):
                report.violations.append(f"vertex {n} is periodic with period {period} > {max(2, n)}")
        else:
            k, loop = first, again - first
            report.transient[n] = (k, loop)
            if k > 2 * n:
                report.violations.append(f"orbit of {n} enters its cycle at {k} > {2 * n}")
            if loop > n:
                report.violations.append(f"orbit of {n} has cycle length {loop} > {n}")
            if k > 2 * n - 1:
                report.sharp_entry = False
    return report
