"""Name and attribute resolution over a parsed unit.

Predeclared names: the root interface IUnknown, the IID identifier type, and
HRESULT (an int alias unless the unit typedefs it, which Win32 headers do).
Resolution validates every type reference, size_is/iid_is attribute targets,
and interface inheritance; the unit itself is returned unchanged.
"""

from __future__ import annotations

from typing import Optional

from mlidl.idl import ast
from mlidl.idl.errors import BadAttrTarget, InheritanceCycle, UnresolvedType

PREDECLARED_INTERFACES = ("IUnknown",)
PREDECLARED_TYPES = ("IID", "HRESULT")

_INTEGER_BASES = frozenset({"int", "long", "unsigned long", "UINT"})


def symbol_table(unit: ast.IdlUnit) -> dict[str, ast.Decl]:
    table: dict[str, ast.Decl] = {}
    for d in unit.decls:
        if isinstance(d, ast.SmlName):
            continue
        table[d.name] = d
    return table


def resolve(unit: ast.IdlUnit) -> ast.IdlUnit:
    table = symbol_table(unit)

    def err(cls: type, msg: str, loc: Optional[ast.Loc]) -> Exception:
        line = loc.line if loc else 0
        col = loc.col if loc else 0
        return cls(msg, line, col, unit.source_name)

    def check_type(t: ast.IdlType, loc: Optional[ast.Loc]) -> None:
        if isinstance(t, ast.BaseType):
            return
        if isinstance(t, ast.NamedType):
            if t.name in table or t.name in PREDECLARED_TYPES \
                    or t.name in PREDECLARED_INTERFACES:
                return
            raise err(UnresolvedType, f"unresolved type {t.name!r}", loc)
        if isinstance(t, ast.PtrType):
            check_type(t.to, loc)
            return
        if isinstance(t, ast.ArrayType):
            check_type(t.elem, loc)
            return
        if isinstance(t, ast.FuncType):
            check_type(t.ret, loc)
            for p in t.params:
                check_type(p.type, p.loc)
            return
        raise err(UnresolvedType, f"unknown type node {t!r}", loc)

    def is_integer(t: ast.IdlType) -> bool:
        t = strip_aliases(t)
        return isinstance(t, ast.BaseType) and t.name in _INTEGER_BASES

    def is_iid(t: ast.IdlType) -> bool:
        while isinstance(t, ast.PtrType):
            t = t.to
        t = strip_aliases(t)
        return isinstance(t, ast.NamedType) and t.name == "IID"

    def strip_aliases(t: ast.IdlType) -> ast.IdlType:
        seen: set[str] = set()
        while isinstance(t, ast.NamedType):
            if t.name in seen:
                break
            seen.add(t.name)
            d = table.get(t.name)
            if isinstance(d, ast.Typedef) and not isinstance(d.type, ast.FuncType):
                t = d.type
            else:
                break
        return t

    def check_params(params: tuple[ast.ParamDecl, ...]) -> None:
        index = {p.name: i for i, p in enumerate(params)}
        for i, p in enumerate(params):
            check_type(p.type, p.loc)
            if p.size_is is not None:
                j = index.get(p.size_is)
                if j is None:
                    raise err(BadAttrTarget,
                              f"size_is target {p.size_is!r} is not a parameter "
                              f"of this operation", p.loc)
                if not is_integer(params[j].type):
                    raise err(BadAttrTarget,
                              f"size_is target {p.size_is!r} is not an integer "
                              f"parameter", p.loc)
            if p.iid_is is not None:
                j = index.get(p.iid_is)
                if j is None or j >= i:
                    raise err(BadAttrTarget,
                              f"iid_is target {p.iid_is!r} must name an earlier "
                              f"parameter", p.loc)
                if not is_iid(params[j].type):
                    raise err(BadAttrTarget,
                              f"iid_is target {p.iid_is!r} is not an IID "
                              f"parameter", p.loc)

    for d in unit.decls:
        if isinstance(d, ast.Typedef):
            check_type(d.type, d.loc)
            if isinstance(d.type, ast.FuncType):
                check_params(d.type.params)
        elif isinstance(d, ast.RecordDecl):
            for f in d.fields:
                check_type(f.type, f.loc)
        elif isinstance(d, ast.Const):
            check_type(d.type, d.loc)
        elif isinstance(d, ast.Interface):
            for op in d.ops:
                check_type(op.ret, op.loc)
                check_params(op.params)

    _check_inheritance(unit, table)
    return unit


def _check_inheritance(unit: ast.IdlUnit, table: dict[str, ast.Decl]) -> None:
    for iface in unit.interfaces():
        seen = [iface.name]
        parent = iface.parent
        while parent is not None:
            if parent in PREDECLARED_INTERFACES:
                break
            d = table.get(parent)
            if not isinstance(d, ast.Interface):
                raise UnresolvedType(
                    f"interface {iface.name!r} inherits from undefined "
                    f"interface {parent!r}",
                    iface.loc.line if iface.loc else 0,
                    iface.loc.col if iface.loc else 0,
                    unit.source_name,
                )
            if parent in seen:
                cycle = " -> ".join(seen + [parent])
                raise InheritanceCycle(
                    f"interface inheritance cycle: {cycle}",
                    iface.loc.line if iface.loc else 0,
                    iface.loc.col if iface.loc else 0,
                    unit.source_name,
                )
            seen.append(parent)
            parent = d.parent
