from __future__ import annotations

import random

import pytest

from mlidl.com import (
    ClassNotRegistered,
    Clsid,
    ComObject,
    DeadObject,
    E_NOINTERFACE,
    Guid,
    IID_IUNKNOWN,
    Iid,
    NoInterface,
    Registry,
    add_ref,
    co_create_instance,
    co_get_class_object,
    co_register_class_object,
    co_unregister_class_object,
    ComError,
    get_method,
    make_interface,
    query_interface,
    release,
    simple_factory,
)

CLSID_BAR = Clsid(Guid.parse("{C9E1D3A0-4B5A-4C7E-9A10-2F6B8A1D0001}"), "Bar")
IID_IX = Iid(Guid.parse("{C9E1D3A0-4B5A-4C7E-9A10-2F6B8A1D0002}"), "IX")
IID_IY = Iid(Guid.parse("{C9E1D3A0-4B5A-4C7E-9A10-2F6B8A1D0003}"), "IY")
IID_IZ = Iid(Guid.parse("{C9E1D3A0-4B5A-4C7E-9A10-2F6B8A1D0004}"), "IZ")
IID_NONE = Iid(Guid.parse("{DEADBEEF-0000-0000-0000-000000000000}"), "INone")


def build_bar(mem, log=None):
    log = log if log is not None else []
    obj = ComObject(mem, CLSID_BAR)
    make_interface([lambda ws: (log.append("FooX"), 0)[1]], obj, IID_IX)
    make_interface([lambda ws: (log.append("FooY"), 0)[1]], obj, IID_IY)
    return obj, log


# -- guids ----------------------------------------------------------------------


def test_guid_parse_print_round_trip():
    text = "{00000001-0002-0003-0405-060708090A0B}"
    assert str(Guid.parse(text)) == text


def test_guid_case_normalized():
    assert str(Guid.parse("{c9e1d3a0-4b5a-4c7e-9a10-2f6b8a1d0001}")) == \
        "{C9E1D3A0-4B5A-4C7E-9A10-2F6B8A1D0001}"


def test_guid_malformed():
    with pytest.raises(ValueError):
        Guid.parse("not-a-guid")
    with pytest.raises(ValueError):
        Guid.parse("{C9E1D3A0-4B5A-4C7E-9A10-2F6B8A1D000}")


def test_guid_words_round_trip():
    g = Guid.parse("{12345678-9ABC-DEF0-1122-334455667788}")
    assert Guid.from_words(g.to_words()) == g
    assert g.to_words()[0] == 0x12345678


def test_iunknown_canonical_value():
    assert str(IID_IUNKNOWN.guid) == "{00000000-0000-0000-C000-000000000046}"


# -- vtable layout ---------------------------------------------------------------


def test_make_interface_slot_counts(mem):
    obj = ComObject(mem, CLSID_BAR)
    ix = make_interface([lambda ws: 0], obj, IID_IX)
    vtable = mem.read(ix.addr, 1)[0]
    assert len(mem.read(vtable, 4)) == 4  # qi, addref, release, fooX
    iz = make_interface([], obj, IID_IZ)
    vt2 = mem.read(iz.addr, 1)[0]
    assert len(mem.read(vt2, 3)) == 3


def test_vtable_slots_are_closure_addresses(mem):
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    vtable = mem.read(ix.addr, 1)[0]
    for slot in mem.read(vtable, 4):
        mem.addr_to_fun(slot)  # raises NotCallable if not a closure


def test_get_method_runs_method(mem):
    obj, log = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    get_method(ix, 3)([])
    assert log == ["FooX"]


def test_get_method_slot_zero_is_queryinterface(mem):
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    qi = get_method(ix, 0)
    blk = mem.alloc(4)
    out = mem.alloc(1)
    mem.store(blk, IID_IY.guid.to_words())
    assert qi([ix.addr, blk, out]) == 0
    assert mem.read(out, 1)[0] == obj.find_interface(IID_IY).addr
    release(ix)  # balance the raw QI's reference
    mem.free(blk)
    mem.free(out)


def test_get_method_out_of_range(mem):
    from mlidl.wordmem import OutOfBounds

    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    with pytest.raises(OutOfBounds):
        get_method(ix, 99)


# -- IUnknown semantics ---------------------------------------------------------


def test_query_interface_returns_other_interface(mem):
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    before = obj.refcount
    iy = query_interface(ix, IID_IY)
    assert iy.iid == IID_IY
    assert obj.refcount == before + 1
    release(iy)


def test_iunknown_identity_shared(mem):
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    iy = obj.find_interface(IID_IY)
    a = query_interface(ix, IID_IUNKNOWN)
    b = query_interface(iy, IID_IUNKNOWN)
    assert a.addr == b.addr == obj.identity.addr
    release(a)
    release(b)


def test_identity_differs_across_objects(mem):
    obj1, _ = build_bar(mem)
    obj2 = ComObject(mem, CLSID_BAR)
    make_interface([], obj2, IID_IX)
    assert obj1.identity.addr != obj2.identity.addr


def test_unknown_iid_raises_no_interface(mem):
    obj, _ = build_bar(mem)
    with pytest.raises(NoInterface) as exc:
        query_interface(obj.find_interface(IID_IX), IID_NONE)
    assert exc.value.hresult == 0x80004002
    assert E_NOINTERFACE == 0x80004002


def test_refcount_lifecycle(mem):
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    assert obj.refcount == 1
    assert add_ref(ix) == 2
    assert release(ix) == 1
    assert release(ix) == 0
    assert not obj.alive
    with pytest.raises(DeadObject):
        get_method(ix, 3)
    with pytest.raises(DeadObject):
        release(ix)


def test_qi_then_release_restores_count(mem):
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    start = obj.refcount
    iy = query_interface(ix, IID_IY)
    release(iy)
    assert obj.refcount == start


def test_destruction_frees_exactly_object_blocks(mem):
    baseline = mem.live_count
    obj, _ = build_bar(mem)
    created = mem.live_count - baseline
    assert created == obj.block_count == 6  # 3 interfaces x (vtable + slot)
    release(obj.identity)
    assert mem.live_count == baseline


def test_refcount_conservation_random_balanced(mem):
    rng = random.Random(0xBA1)
    obj, _ = build_bar(mem)
    refs = [obj.identity]
    start = obj.refcount
    depth = 0
    for _ in range(1000):
        if depth > 0 and rng.random() < 0.5:
            release(refs.pop())
            depth -= 1
        else:
            base = refs[rng.randrange(len(refs))]
            if rng.random() < 0.5:
                refs.append(query_interface(
                    base, rng.choice((IID_IX, IID_IY, IID_IUNKNOWN))))
            else:
                add_ref(base)
                refs.append(base)
            depth += 1
        assert obj.refcount == start + depth
        assert obj.refcount > 0
    while depth:
        release(refs.pop())
        depth -= 1
    assert obj.refcount == start


# -- activation ------------------------------------------------------------------


def test_factory_create_starts_at_one(mem):
    factory = simple_factory(CLSID_BAR, lambda: build_bar(mem)[0], label="Bar")
    ref = factory.create(IID_IX)
    assert ref.owner.refcount == 1
    release(ref)


def test_registry_roundtrip(mem):
    reg = Registry()
    factory = simple_factory(CLSID_BAR, lambda: build_bar(mem)[0], label="Bar")
    co_register_class_object(reg, CLSID_BAR, factory)
    assert co_get_class_object(reg, CLSID_BAR) is factory
    ref = co_create_instance(reg, CLSID_BAR, IID_IX)
    assert ref.iid == IID_IX
    release(ref)


def test_duplicate_registration_rejected(mem):
    reg = Registry()
    factory = simple_factory(CLSID_BAR, lambda: build_bar(mem)[0], label="Bar")
    co_register_class_object(reg, CLSID_BAR, factory)
    with pytest.raises(ComError):
        co_register_class_object(reg, CLSID_BAR, factory)


def test_unregister_then_create_fails(mem):
    reg = Registry()
    factory = simple_factory(CLSID_BAR, lambda: build_bar(mem)[0], label="Bar")
    co_register_class_object(reg, CLSID_BAR, factory)
    co_unregister_class_object(reg, CLSID_BAR)
    with pytest.raises(ClassNotRegistered) as exc:
        co_create_instance(reg, CLSID_BAR, IID_IX)
    assert exc.value.hresult == 0x80040154


def test_unknown_clsid(mem):
    reg = Registry()
    with pytest.raises(ClassNotRegistered):
        co_get_class_object(reg, CLSID_BAR)


def test_failed_create_leaves_no_live_object(mem):
    reg = Registry()
    factory = simple_factory(CLSID_BAR, lambda: build_bar(mem)[0], label="Bar")
    co_register_class_object(reg, CLSID_BAR, factory)
    baseline = mem.live_count
    with pytest.raises(NoInterface):
        co_create_instance(reg, CLSID_BAR, IID_NONE)
    assert mem.live_count == baseline


def test_registry_dump_load(mem):
    reg = Registry()
    factory = simple_factory(CLSID_BAR, lambda: build_bar(mem)[0], label="Bar")
    co_register_class_object(reg, CLSID_BAR, factory)
    text = reg.dump()
    assert text == f"{CLSID_BAR.guid} Bar\n"
    again = Registry.load(text, {"Bar": factory})
    assert co_get_class_object(again, CLSID_BAR) is factory
    assert again.dump() == text


# -- raw ABI ---------------------------------------------------------------------


def test_raw_vtable_call_matches_query_interface(mem):
    rng = random.Random(0xAB1)
    obj, _ = build_bar(mem)
    ix = obj.find_interface(IID_IX)
    iids = [IID_IX, IID_IY, IID_IUNKNOWN, IID_NONE, IID_IZ]
    for _ in range(100):
        iid = iids[rng.randrange(len(iids))]
        blk = mem.alloc(4)
        out = mem.alloc(1)
        mem.store(blk, iid.guid.to_words())
        hr = mem.addr_to_fun(mem.read(mem.read(ix.addr, 1)[0], 1)[0])(
            [ix.addr, blk, out])
        raw_addr = mem.read(out, 1)[0]
        if hr == 0:
            ref = query_interface(ix, iid)
            assert raw_addr == ref.addr
            release(ref)
            release(ref)  # balance the raw call's reference too
        else:
            assert hr == E_NOINTERFACE and raw_addr == 0
            with pytest.raises(NoInterface):
                query_interface(ix, iid)
        mem.free(blk)
        mem.free(out)
