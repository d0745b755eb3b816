import pytest

from fxacc.obfuscation import (
    OffsetDB, OffsetSource, Ralph, RegLoc, SnapshotError, StackLoc, StripeLoc, VarBinding,
    restore_code, restore_plan, snapshot,
)


def test_offset_source_deterministic():
    a, b = OffsetSource(5), OffsetSource(5)
    assert [a.fresh() for _ in range(10)] == [b.fresh() for _ in range(10)]
    assert a.draws == 10
    assert OffsetSource(6).fresh() != OffsetSource(5).fresh()


def test_offsetdb_masks_and_copies():
    db = OffsetDB()
    db[RegLoc(3)] = -1
    assert db[RegLoc(3)] == 0xFFFF_FFFF
    c = db.copy()
    c[RegLoc(3)] = 0
    assert db[RegLoc(3)] == 0xFFFF_FFFF
    assert db.agrees_with({RegLoc(3): 0xFFFF_FFFF})
    assert not c.agrees_with({RegLoc(3): 0xFFFF_FFFF})


def test_restore_plan_reconciles():
    db = OffsetDB({RegLoc(1): 10, RegLoc(2): 20, StripeLoc(0, 0): 5})
    snap = snapshot("L", db, [RegLoc(1), RegLoc(2), StripeLoc(0, 0)])
    db[RegLoc(1)] = 15
    db[StripeLoc(0, 0)] = 1
    assert restore_plan(snap, db) == [(RegLoc(1), (10 - 15) & 0xFFFF_FFFF), (StripeLoc(0, 0), 4)]
    code, out = restore_code(snap, db, lambda r, k: [("addi", r, k)], lambda loc, k: [("storm", loc, k)])
    assert len(code) == 2
    assert out.agrees_with(snap.offsets)


def test_snapshot_needs_every_location():
    with pytest.raises(SnapshotError):
        snapshot("L", OffsetDB(), [RegLoc(1)])


def test_var_binding_shadowing():
    b = VarBinding()
    b.bind("x", RegLoc(1))
    b.push()
    b.bind("x", RegLoc(2))
    assert b.lookup("x") == RegLoc(2)
    b.pop()
    assert b.lookup("x") == RegLoc(1)
    with pytest.raises(KeyError):
        b.lookup("y")


def test_ralph_spills_past_bound():
    r = Ralph(bound=40)
    assert r.resolve(39) == RegLoc(39)
    assert r.resolve(41) == StackLoc(1)
    assert r.is_spr(32) and not r.is_spr(31) and not r.is_spr(40)
