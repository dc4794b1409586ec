from __future__ import annotations

import pytest

from mlidl.idl import (
    BadAttrTarget,
    InheritanceCycle,
    UnresolvedType,
    parse_text,
    resolve,
)


def test_time_unit_resolves_unchanged(time_unit):
    assert resolve(time_unit) is time_unit


def test_win32_unit_resolves(win32_unit):
    assert resolve(win32_unit) is win32_unit


def test_unresolved_type():
    unit = parse_text("interface I { void f ([in] BOGUS x); }")
    with pytest.raises(UnresolvedType):
        resolve(unit)


def test_size_is_missing_target():
    unit = parse_text("interface I { void f ([in,size_is (cNames)] int *a); }")
    with pytest.raises(BadAttrTarget):
        resolve(unit)


def test_size_is_target_must_be_integer():
    unit = parse_text("""
        typedef [string] char *STRING;
        interface I { void f ([in,size_is (s)] int *a, [in] STRING s); }
    """)
    with pytest.raises(BadAttrTarget):
        resolve(unit)


def test_size_is_target_may_follow_the_array(win32_unit):
    # PolyLineTo names cPoints, declared after the array parameter
    resolve(win32_unit)


def test_iid_is_must_name_earlier_param():
    unit = parse_text(
        "interface I { void f ([out,iid_is (iid)] void **ppv, "
        "[in] const IID& iid); }")
    with pytest.raises(BadAttrTarget):
        resolve(unit)


def test_iid_is_target_must_be_iid():
    unit = parse_text(
        "interface I { void f ([in] int iid, "
        "[out,iid_is (iid)] void **ppv); }")
    with pytest.raises(BadAttrTarget):
        resolve(unit)


def test_two_cycle_inheritance():
    unit = parse_text("interface A : B { } interface B : A { }")
    with pytest.raises(InheritanceCycle):
        resolve(unit)


def test_longer_inheritance_chain_ok():
    resolve(parse_text("interface A { } interface B : A { } interface C : B { }"))


def test_hresult_accepted_without_typedef():
    resolve(parse_text("interface I { HRESULT f (); }"))


def test_hresult_accepted_with_typedef(win32_unit):
    # the win32 corpus typedefs HRESULT itself
    resolve(win32_unit)
