"""Incremental matcher: invariants, cycle control, checkpoints, determinism."""

from __future__ import annotations

import json

import pytest

from hallforest import (
    HallWitness,
    HaremMatcher,
    MatchFunction,
    MatcherBudgetError,
    SymmetricDoubleGraph,
    cumulative_shift,
    double_graph,
    is_A_reflected,
    shift_witness,
    verify_cycle_control,
)


def fresh(entourage, d, **kw):
    return HaremMatcher(double_graph(entourage), d, HallWitness.identity(), **kw)


@pytest.fixture(scope="module")
def m80(tree6):
    m = fresh(tree6, 4)
    m.advance_to_step(80)
    return m


# -- construction ----------------------------------------------------------------


def test_initial_state(tree6):
    m = fresh(tree6, 4)
    assert m.step == 0
    assert m.fans() == {}
    assert m.owner_of(1) == 0
    assert m.partners_of(1) == ()
    assert not m.a_removed(1) and not m.b_removed(1)


def test_rejects_small_d(tree6):
    with pytest.raises(ValueError):
        fresh(tree6, 2)


def test_rejects_diagonal_host():
    host = SymmetricDoubleGraph(lambda v: tuple(range(max(1, v - 3), v + 4)))
    with pytest.raises(ValueError, match="itself"):
        HaremMatcher(host, 3, HallWitness.identity())


def test_rejects_asymmetric_host():
    host = SymmetricDoubleGraph(lambda v: tuple(range(v + 1, v + 8)))
    with pytest.raises(ValueError, match="symmetric"):
        HaremMatcher(host, 3, HallWitness.identity())


def test_rejects_low_degree_host():
    ring = SymmetricDoubleGraph(lambda v: tuple(sorted({(v % 6) + 1, ((v - 2) % 6) + 1})))
    with pytest.raises(ValueError, match="degree"):
        HaremMatcher(ring, 3, HallWitness.identity())


def test_radius_schedule_is_capped(tree6):
    m = fresh(tree6, 4)
    assert m.effective_radius(0) == 3
    assert m.effective_radius(50) == 3
    wide = fresh(tree6, 4, radius_cap=4)
    assert wide.effective_radius(0) == 5  # even caps bump to the next odd
    with pytest.raises(ValueError):
        fresh(tree6, 4, radius_cap=2)


# -- the anchor 2-cycle ------------------------------------------------------------


def test_one_and_its_partner_swap(tree6, tree7):
    for ent, d in ((tree6, 4), (tree6, 3), (tree7, 4)):
        m = fresh(ent, d)
        assert m.f(m.f(1)) == 1


# -- bookkeeping under many steps ----------------------------------------------------


def test_state_recount_after_eighty_steps(m80):
    d1 = m80.d - 1
    removed_a = m80.removed_a_set()
    removed_b = m80.removed_b_set()
    assert len(removed_b) == d1 * len(removed_a)
    for a in removed_a:
        parts = m80.partners_of(a)
        assert len(parts) == d1 and len(set(parts)) == d1
        for b in parts:
            assert m80.owner_of(b) == a
            assert m80.graph.adjacent(a, b)
    for b in removed_b:
        assert b in m80.partners_of(m80.owner_of(b))
    # reserved fans live strictly in the remaining host
    for root, leaves in m80.fans().items():
        assert root not in removed_a
        assert not set(leaves) & removed_b


def test_preimages_match_owner_scan(m80):
    scan: dict[int, list[int]] = {}
    for b in sorted(m80.removed_b_set()):
        scan.setdefault(m80.owner_of(b), []).append(b)
    for a in range(1, 21):
        assert m80.preimages(a) == tuple(scan[a])


def test_progress_bound_both_copies(tree6):
    m = fresh(tree6, 4)
    for n in range(1, 61):
        m.advance_to_step(n)
        for v in range(1, n + 1):
            assert m.a_removed(v), (n, v)
            assert m.b_removed(v), (n, v)


def test_fan_count_and_reflectedness_per_step(tree6):
    m = fresh(tree6, 4)
    host = m.graph
    for _ in range(60):
        m.run_step()
        assert len(m.fans()) <= m.step
        assert is_A_reflected(host, 40, m.removed_a_set(), m.removed_b_set())


def test_match_function_view(m80):
    f = MatchFunction(m80)
    assert f.d == 4
    assert f(1) == m80.f(1)
    assert f.iterate(1, 2) == 1
    assert f.preimages(2) == m80.preimages(2)


# -- cycle control ----------------------------------------------------------------


def test_cycle_control_on_tree_host(m80):
    report = verify_cycle_control(m80.f, 60)
    assert report.ok
    assert report.sharp_entry
    assert set(report.periodic) | set(report.transient) == set(range(2, 61))
    for n, period in report.periodic.items():
        assert period <= max(2, n)
    for n, (k, loop) in report.transient.items():
        assert 1 <= k <= 2 * n and 1 <= loop <= n


def test_cycle_control_flags_bad_function():
    report = verify_cycle_control(lambda n: n, 5)  # every point is a fixed point...
    assert report.ok  # ...which is period 1, within every bound
    shifted = verify_cycle_control(lambda n: n + 1, 5)  # never repeats
    assert not shifted.ok
    assert any("no repeat" in v for v in shifted.violations)


# -- witness bookkeeping -------------------------------------------------------------


def test_cumulative_shift_pins():
    assert cumulative_shift(4, 0) == 0
    assert cumulative_shift(4, 1) == 3
    assert cumulative_shift(4, 2) == 11
    assert cumulative_shift(3, 5) == 2 + 4 * 6


def test_witness_tracks_steps(tree6):
    m = fresh(tree6, 4)
    h = HallWitness.identity()
    assert m.witness(1) == 1
    m.advance_to_step(2)
    assert m.witness(1) == h(1 + cumulative_shift(4, 2))
    assert shift_witness(h, 11)(1) == 12


def connected_subsets(section, seeds, max_size):
    frontier = {frozenset((s,)) for s in seeds}
    out = set(frontier)
    for _ in range(max_size - 1):
        grown = set()
        for sub in frontier:
            for v in sub:
                for w in section(v):
                    if w not in sub:
                        grown.add(sub | {w})
        out |= grown
        frontier = grown
    return out


def test_identity_witness_is_justified_on_tree(tree6):
    # the identity witness promises |N(X)| - (d-1)|X| >= |X|; on the 6-regular
    # tree every finite X in fact has |N(X)| >= 5|X| + 1
    host = double_graph(tree6)
    for sub in connected_subsets(host.neighbors_a, range(1, 25), 4):
        hood = set()
        for v in sub:
            hood.update(host.neighbors_a(v))
        assert len(hood) >= 5 * len(sub) + 1


# -- budget ------------------------------------------------------------------------


def test_step_budget_guards_lazy_queries(tree6):
    m = fresh(tree6, 4, step_limit=3)
    with pytest.raises(MatcherBudgetError):
        m.f(50)
    assert m.step == 3
    m.step_limit = None
    assert m.f(50) > 0  # the same matcher finishes once the budget lifts


# -- checkpointing -----------------------------------------------------------------


def test_checkpoint_shape(m80):
    cp = m80.checkpoint()
    assert set(cp) == {"d", "step", "committed", "removed_a", "removed_b", "fans"}
    assert cp["d"] == 4 and cp["step"] == 80
    assert cp["removed_a"] == sorted(cp["removed_a"])
    assert cp["removed_b"] == sorted(b for _, b in cp["committed"])
    assert sorted({a for a, _ in cp["committed"]}) == cp["removed_a"]
    for fan in cp["fans"]:
        assert set(fan) == {"root", "leaves"}
    assert json.loads(m80.checkpoint_json()) == cp


def test_restore_resumes_bit_exact(tree6):
    straight = fresh(tree6, 4)
    straight.advance_to_step(80)
    stopped = fresh(tree6, 4)
    stopped.advance_to_step(40)
    resumed = HaremMatcher.restore(
        double_graph(tree6), HallWitness.identity(),
        json.loads(stopped.checkpoint_json()))
    resumed.advance_to_step(80)
    assert resumed.checkpoint_json() == straight.checkpoint_json()


def test_restore_rejects_corrupt_checkpoints(tree6):
    m = fresh(tree6, 4)
    m.advance_to_step(10)
    cp = m.checkpoint()
    broken = dict(cp, committed=cp["committed"][1:])
    with pytest.raises(ValueError):
        HaremMatcher.restore(double_graph(tree6), HallWitness.identity(), broken)


def test_two_runs_are_byte_identical(tree6):
    a = fresh(tree6, 4)
    b = fresh(tree6, 4)
    a.advance_to_step(60)
    b.advance_to_step(60)
    assert a.checkpoint_json() == b.checkpoint_json()
