"""Codegen-ready binding model.

A LiftedSig keeps the declaration-ordered parameter list (which is also the
ABI argument order) and derives the two client-facing views from it: the
in-parameters, and the results list (out parameters in declaration order,
then the function result last if the operation is not void).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

from mlidl.semtypes import SemType


@dataclass(frozen=True)
class ParamSig:
    name: str
    display: str          # SML-facing type text, e.g. "HWND" or "POINT list"
    sem: SemType
    dir: str = "in"       # in | out | inout
    byref: bool = False   # packed to a heap block; the address is the ABI word


@dataclass(frozen=True)
class RetSig:
    display: str
    sem: SemType


@dataclass(frozen=True)
class LiftedSig:
    name: str
    params: tuple[ParamSig, ...]
    ret: Optional[RetSig] = None
    kind: str = "method"          # method | query_interface
    callback: bool = False

    @property
    def ins(self) -> tuple[ParamSig, ...]:
        return tuple(p for p in self.params if p.dir in ("in", "inout"))

    @property
    def outs(self) -> tuple[ParamSig, ...]:
        return tuple(p for p in self.params if p.dir in ("out", "inout"))

    @property
    def results(self) -> tuple[RetSig, ...]:
        out = tuple(RetSig(p.display, p.sem) for p in self.outs)
        if self.ret is not None:
            out = out + (self.ret,)
        return out


@dataclass(frozen=True)
class EnumMap:
    name: str
    variants: tuple[tuple[str, int], ...]   # (variant, 32-bit word), source order

    @cached_property
    def _to_int(self) -> dict[str, int]:
        return {name: value for name, value in self.variants}

    @cached_property
    def _from_int(self) -> dict[int, str]:
        table: dict[int, str] = {}
        for name, value in self.variants:
            table.setdefault(value, name)   # first declaration wins for aliases
        return table

    def to_int(self, name: str) -> int:
        try:
            return self._to_int[name]
        except KeyError:
            raise KeyError(f"{self.name} has no variant {name!r}") from None

    def from_int(self, value: int) -> Optional[str]:
        return self._from_int.get(value & 0xFFFFFFFF)


@dataclass(frozen=True)
class FieldLayout:
    name: str
    display: str
    sem: SemType
    offset: int           # words from the start of the record


@dataclass(frozen=True)
class RecordLayout:
    name: str
    fields: tuple[FieldLayout, ...]
    size: int             # words

    def field_named(self, name: str) -> FieldLayout:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(f"{self.name} has no field {name!r}")


@dataclass(frozen=True)
class ConstDef:
    name: str
    display: str
    value: Union[int, str]
    form: str             # string | int | word


@dataclass(frozen=True)
class CallbackDef:
    name: str
    sig: LiftedSig        # callback=True, name == typedef name


@dataclass(frozen=True)
class AliasDef:
    name: str
    display: str          # rendering of the aliased type
    sem: SemType


@dataclass(frozen=True)
class InterfaceDesc:
    name: str
    ops: tuple[LiftedSig, ...]
    source: Optional[str] = None    # sml_source library
    parent: Optional[str] = None
    iid: Optional[str] = None       # GUID text, com mode only


@dataclass(frozen=True)
class BindingDesc:
    module: str
    mode: str                       # static | dynamic | com
    level: str                      # abstract | auto
    interfaces: tuple[InterfaceDesc, ...] = ()
    enums: tuple[EnumMap, ...] = ()
    records: tuple[RecordLayout, ...] = ()
    consts: tuple[ConstDef, ...] = ()
    callbacks: tuple[CallbackDef, ...] = ()
    aliases: tuple[AliasDef, ...] = ()
    clsid: Optional[str] = None     # GUID text, com mode only

    def record(self, name: str) -> RecordLayout:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(f"no record {name!r} in binding {self.module!r}")

    def enum(self, name: str) -> EnumMap:
        for e in self.enums:
            if e.name == name:
                return e
        raise KeyError(f"no enum {name!r} in binding {self.module!r}")

    def callback_named(self, name: str) -> CallbackDef:
        for c in self.callbacks:
            if c.name == name:
                return c
        raise KeyError(f"no callback {name!r} in binding {self.module!r}")

    def interface(self, name: str) -> InterfaceDesc:
        for i in self.interfaces:
            if i.name == name:
                return i
        raise KeyError(f"no interface {name!r} in binding {self.module!r}")
