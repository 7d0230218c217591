import pytest

from approxgroups.chain import core_chain
from approxgroups.errors import PreconditionViolated
from approxgroups.groups import cyclic
from approxgroups.sets import GroupSet, conjugate, is_subgroup, power

from pack import PACK


def test_subgroup_stabilizes_at_once():
    G = cyclic(12)
    H = GroupSet.from_ids(G, [0, 3, 6, 9])
    r = core_chain(H)
    assert r.stabilized_at == 0 and r.H == H
    assert r.final_is_subgroup and r.index_in_generated == 1


def test_interval_plain_chain():
    _, A = PACK["interval-c256"].build()
    r = core_chain(A, max_steps=6)
    for prev, cur in zip(r.stages, r.stages[1:]):
        assert power(cur.S, 8).issubset(prev.H) and cur.H.issubset(prev.H)
        assert cur.S8_in_prev_H and cur.descends
    assert all(st.cover_A.replay() for st in r.stages)
    if r.stabilized_at is not None:
        assert r.final_is_subgroup and is_subgroup(r.H)


def test_normal_mode_heisenberg():
    _, A = PACK["heis5-ball2"].build()
    r = core_chain(A, mode="normal")
    assert r.stabilized_at is not None
    assert r.final_is_A_normalized
    assert all(conjugate(r.H, a) == r.H for a in A)


def test_tsv():
    _, A = PACK["interval-c256"].build()
    lines = core_chain(A).tsv().splitlines()
    assert lines[0].split("\t") == ["step", "|S_i|", "|H_i|", "L"]
    assert lines[1] == "0\t33\t129\t"


def test_bad_arguments():
    G = cyclic(12)
    with pytest.raises(PreconditionViolated):
        core_chain(GroupSet.from_ids(G, [0, 1]))
    with pytest.raises(PreconditionViolated):
        core_chain(GroupSet.whole(G), max_steps=0)
    with pytest.raises(ValueError):
        core_chain(GroupSet.whole(G), mode="twisted")


def test_step_limit_reports_unstabilized():
    _, A = PACK["interval-c256"].build()
    r = core_chain(A, max_steps=1)
    assert len(r.stages) == 2 and r.stabilized_at is None and r.final_is_subgroup is None
