"""Value marshalling and the call drivers.

`call` drives a complete client-side call: pack the in-parameters per the
lifted signature (declaration order is the ABI argument order), allocate one
block per out parameter, invoke the callable once with the full word list,
unmarshal the results (out parameters in declaration order, then the return
value), and free every temporary.

`skeleton` is the server-side dual: it wraps a host function as a
``word list -> word`` closure that unpacks in-parameters, calls the
implementation, writes out-blocks, and returns the result word.

Layouts are word-granular: scalars, handles, bools and enums are one word;
records are their fields in declaration order with no padding; strings,
arrays and callbacks travel as a one-word address.
"""

from __future__ import annotations

from typing import Any, Callable, Optional, Sequence, Union

from mlidl.binding.model import BindingDesc, LiftedSig, ParamSig, RecordLayout
from mlidl.semtypes import SemType
from mlidl.wordmem import Mem, Symbol, WordFn, to_signed, word

Value = Any

_BUILTIN_RECORDS = {"IID": 4}


class MarshalError(Exception):
    pass


class TypeMismatch(MarshalError):
    pass


class BadString(MarshalError):
    pass


class DecodeError(MarshalError):
    pass


class ArityMismatch(MarshalError):
    pass


# -- layout -------------------------------------------------------------------


def layout_of(t: SemType, desc: Optional[BindingDesc] = None) -> int:
    """Width of a value of type `t`, in words."""
    if t.kind == "record":
        if desc is not None:
            try:
                return desc.record(t.name).size
            except KeyError:
                pass
        if t.name in _BUILTIN_RECORDS:
            return _BUILTIN_RECORDS[t.name]
        raise MarshalError(f"unknown record type {t.name!r}")
    if t.kind == "unit":
        raise MarshalError("void is not a value type")
    return 1


def _record_layout(name: str, desc: Optional[BindingDesc]) -> RecordLayout:
    if desc is not None:
        try:
            return desc.record(name)
        except KeyError:
            pass
    raise MarshalError(f"unknown record type {name!r}")


# -- strings -------------------------------------------------------------------


def pack_string8(mem: Mem, s: str) -> int:
    if "\x00" in s:
        raise BadString("string contains NUL")
    data = s.encode("utf-8") + b"\x00"
    nwords = (len(data) + 3) // 4
    data = data.ljust(nwords * 4, b"\x00")
    addr = mem.alloc(nwords)
    mem.store(addr, [int.from_bytes(data[i:i + 4], "little")
                     for i in range(0, len(data), 4)])
    return addr


def read_string8(mem: Mem, addr: int) -> str:
    if addr == 0:
        return ""
    data = bytearray()
    while True:
        w = mem.read(addr, 1)[0]
        chunk = w.to_bytes(4, "little")
        if 0 in chunk:
            data.extend(chunk[:chunk.index(0)])
            break
        data.extend(chunk)
        addr = mem.offset(addr, 1)
    return data.decode("utf-8")


def pack_string16(mem: Mem, s: str) -> int:
    if "\x00" in s:
        raise BadString("string contains NUL")
    raw = s.encode("utf-16-le")
    units = [int.from_bytes(raw[i:i + 2], "little") for i in range(0, len(raw), 2)]
    units.append(0)
    if len(units) % 2:
        units.append(0)
    addr = mem.alloc(len(units) // 2)
    mem.store(addr, [units[i] | (units[i + 1] << 16) for i in range(0, len(units), 2)])
    return addr


def read_string16(mem: Mem, addr: int) -> str:
    if addr == 0:
        return ""
    units: list[int] = []
    while True:
        w = mem.read(addr, 1)[0]
        for u in (w & 0xFFFF, w >> 16):
            if u == 0:
                raw = b"".join(x.to_bytes(2, "little") for x in units)
                return raw.decode("utf-16-le")
            units.append(u)
        addr = mem.offset(addr, 1)


# -- value <-> words ----------------------------------------------------------


def _check_int(v: Value, t: SemType) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeMismatch(f"expected an integer for {t.kind}, got {v!r}")
    if not (-0x80000000 <= v <= 0xFFFFFFFF):
        raise TypeMismatch(f"integer {v} does not fit in 32 bits")
    return word(v)


class _Packer:
    """Marshals values, remembering every temporary heap block."""

    def __init__(self, mem: Mem, desc: Optional[BindingDesc]) -> None:
        self.mem = mem
        self.desc = desc
        self.temps: list[int] = []

    def free_temps(self) -> None:
        for addr in self.temps:
            self.mem.free(addr)
        self.temps.clear()

    def to_block(self, v: Value, t: SemType) -> int:
        words = self.inline(v, t)
        addr = self.mem.alloc(len(words))
        self.mem.store(addr, words)
        self.temps.append(addr)
        return addr

    def pack_array(self, v: Value, t: SemType) -> int:
        if not isinstance(v, list):
            raise TypeMismatch(f"expected a list for array, got {v!r}")
        elem_words: list[int] = []
        for item in v:
            elem_words.extend(self.inline(item, t.elem))
        addr = self.mem.alloc(max(len(elem_words), 1))
        self.mem.store(addr, elem_words)
        self.temps.append(addr)
        return addr

    def inline(self, v: Value, t: SemType) -> list[int]:
        kind = t.kind
        if kind == "int32" or kind == "word32" or kind == "handle" or kind == "opaque":
            return [_check_int(v, t)]
        if kind == "bool":
            if not isinstance(v, bool):
                raise TypeMismatch(f"expected a bool, got {v!r}")
            return [1 if v else 0]
        if kind == "enum":
            if self.desc is None:
                raise MarshalError(f"enum {t.name!r} needs a binding description")
            if not isinstance(v, str):
                raise TypeMismatch(f"expected a {t.name} variant name, got {v!r}")
            try:
                return [self.desc.enum(t.name).to_int(v)]
            except KeyError as exc:
                raise TypeMismatch(str(exc)) from None
        if kind == "string8":
            if not isinstance(v, str):
                raise TypeMismatch(f"expected a string, got {v!r}")
            addr = pack_string8(self.mem, v)
            self.temps.append(addr)
            return [addr]
        if kind == "string16":
            if not isinstance(v, str):
                raise TypeMismatch(f"expected a string, got {v!r}")
            addr = pack_string16(self.mem, v)
            self.temps.append(addr)
            return [addr]
        if kind == "callback":
            if v is None:
                return [0]
            if not callable(v):
                raise TypeMismatch(f"expected a callable or None, got {v!r}")
            return [self.mem.fun_to_addr(v)]
        if kind == "record":
            layout = _record_layout(t.name, self.desc)
            if not isinstance(v, dict):
                raise TypeMismatch(f"expected a field map for {t.name}, got {v!r}")
            if set(v.keys()) != {f.name for f in layout.fields}:
                raise TypeMismatch(
                    f"field set {sorted(v.keys())} does not match record "
                    f"{t.name} {sorted(f.name for f in layout.fields)}")
            words: list[int] = []
            for f in layout.fields:
                words.extend(self.inline(v[f.name], f.sem))
            return words
        if kind == "array":
            return [self.pack_array(v, t)]
        raise MarshalError(f"cannot marshal semantic type {kind!r}")


class _Unpacker:
    def __init__(self, mem: Mem, desc: Optional[BindingDesc]) -> None:
        self.mem = mem
        self.desc = desc

    def inline(self, words: Sequence[int], t: SemType) -> Value:
        kind = t.kind
        if kind in ("record",):
            layout = _record_layout(t.name, self.desc)
            if len(words) != layout.size:
                raise DecodeError(
                    f"record {t.name} needs {layout.size} words, got {len(words)}")
            out: dict[str, Value] = {}
            for f in layout.fields:
                width = layout_of(f.sem, self.desc)
                out[f.name] = self.inline(words[f.offset:f.offset + width], f.sem)
            return out
        if len(words) != 1:
            raise DecodeError(f"{kind} is one word, got {len(words)}")
        w = word(words[0])
        if kind == "int32":
            return to_signed(w)
        if kind in ("word32", "handle", "opaque"):
            return w
        if kind == "bool":
            return w != 0
        if kind == "enum":
            if self.desc is None:
                raise MarshalError(f"enum {t.name!r} needs a binding description")
            name = self.desc.enum(t.name).from_int(w)
            if name is None:
                raise DecodeError(f"{t.name} has no variant with value {w:#x}")
            return name
        if kind == "string8":
            return read_string8(self.mem, w)
        if kind == "string16":
            return read_string16(self.mem, w)
        if kind == "callback":
            return None if w == 0 else self.mem.addr_to_fun(w)
        raise MarshalError(f"cannot unmarshal semantic type {kind!r}")

    def from_block(self, addr: int, t: SemType) -> Value:
        return self.inline(self.mem.read(addr, layout_of(t, self.desc)), t)

    def array(self, addr: int, elem: SemType, count: int) -> list[Value]:
        width = layout_of(elem, self.desc)
        out = []
        for i in range(count):
            words = self.mem.read(self.mem.offset(addr, i * width), width)
            out.append(self.inline(words, elem))
        return out


def marshal_value(v: Value, t: SemType, mem: Mem,
                  desc: Optional[BindingDesc] = None) -> list[int]:
    """Value to words.  Blocks referenced from the words (strings, arrays)
    are fresh allocations owned by the caller."""
    packer = _Packer(mem, desc)
    words = packer.inline(v, t)
    return words


def unmarshal_value(data: Union[int, Sequence[int]], t: SemType, mem: Mem,
                    desc: Optional[BindingDesc] = None) -> Value:
    """Words (or a block address) back to a value; inverse of marshal_value."""
    un = _Unpacker(mem, desc)
    if isinstance(data, int):
        if t.kind in ("record",):
            return un.from_block(data, t)
        return un.inline([data], t)
    return un.inline(list(data), t)


# -- ABI width ----------------------------------------------------------------


def _param_abi_width(p: ParamSig, desc: Optional[BindingDesc]) -> int:
    """Words this parameter occupies in the argument list."""
    if p.dir in ("out", "inout"):
        return 1                       # address of the callee-visible block
    if p.sem.kind == "record" and not p.byref:
        return layout_of(p.sem, desc)  # plain record: passed inline
    return 1


def abi_arity(sig: LiftedSig, desc: Optional[BindingDesc] = None) -> int:
    return sum(_param_abi_width(p, desc) for p in sig.params)


def call_plan(sig: LiftedSig,
              desc: Optional[BindingDesc] = None) -> list[tuple[str, str]]:
    """Per-parameter marshalling actions, in ABI argument order
    (= declaration order): pass-word, pass-addr-of-packed, alloc-out(n),
    pack-string, pack-array, or pack-callback."""
    plan: list[tuple[str, str]] = []
    for p in sig.params:
        if p.dir == "out":
            size = layout_of(p.sem, desc) if p.sem.kind == "record" else 1
            action = f"alloc-out({size})"
        elif p.dir == "inout":
            action = "pass-addr-of-packed"
        elif p.sem.kind == "array":
            action = "pack-array"
        elif p.sem.kind in ("string8", "string16"):
            action = "pack-string"
        elif p.sem.kind == "callback":
            action = "pack-callback"
        elif p.byref:
            action = "pass-addr-of-packed"
        else:
            action = "pass-word"
        plan.append((p.name, action))
    return plan


# -- client call driver ---------------------------------------------------------


def _resolve_callable(f: Union[WordFn, Symbol, int], mem: Mem
                      ) -> tuple[WordFn, Optional[int], Optional[str]]:
    if isinstance(f, Symbol):
        mem.addr_to_fun(f.addr)   # fail early on a stale symbol
        return (lambda words: mem.call(f.addr, words)), f.arity, f.convention
    if isinstance(f, int):
        mem.addr_to_fun(f)
        addr = f
        return (lambda words: mem.call(addr, words)), None, None
    if callable(f):
        return f, None, None
    raise TypeMismatch(f"not callable: {f!r}")


def call(sig: LiftedSig, f: Union[WordFn, Symbol, int], ins: Sequence[Value],
         mem: Mem, desc: Optional[BindingDesc] = None) -> list[Value]:
    in_params = sig.ins
    ins = list(ins)
    if len(ins) != len(in_params):
        raise ArityMismatch(
            f"{sig.name} takes {len(in_params)} in-arguments, got {len(ins)}")
    target, declared_arity, convention = _resolve_callable(f, mem)
    ins_by_name = {p.name: v for p, v in zip(in_params, ins)}

    packer = _Packer(mem, desc)
    out_blocks: list[tuple[ParamSig, int]] = []
    try:
        words: list[int] = []
        in_iter = iter(ins)
        for p, (_, action) in zip(sig.params, call_plan(sig, desc)):
            if action.startswith("alloc-out"):
                if p.sem.kind == "array":
                    raise TypeMismatch(f"{sig.name}.{p.name}: out arrays are "
                                       f"not supported")
                addr = mem.alloc(int(action[len("alloc-out("):-1]))
                packer.temps.append(addr)
                out_blocks.append((p, addr))
                words.append(addr)
                continue
            v = next(in_iter)
            if action == "pack-array":
                count = ins_by_name.get(p.sem.len_from)
                if isinstance(v, list) and isinstance(count, int) \
                        and count != len(v):
                    raise TypeMismatch(
                        f"{sig.name}.{p.name}: array has {len(v)} elements "
                        f"but {p.sem.len_from} is {count}")
                words.append(packer.pack_array(v, p.sem))
            elif action == "pass-addr-of-packed":
                addr = packer.to_block(v, p.sem)
                if p.dir == "inout":
                    out_blocks.append((p, addr))
                words.append(addr)
            else:
                # pass-word, pack-string, pack-callback: inline word(s)
                words.extend(packer.inline(v, p.sem))

        if declared_arity is not None and declared_arity != len(words):
            raise ArityMismatch(
                f"{sig.name}: symbol expects {declared_arity} argument words "
                f"({convention} convention), got {len(words)}")

        ret_word = word(target(words))

        un = _Unpacker(mem, desc)
        results: list[Value] = []
        for p, addr in out_blocks:
            if p.sem.kind == "record":
                results.append(un.from_block(addr, p.sem))
            else:
                results.append(un.inline(mem.read(addr, 1), p.sem))
        if sig.ret is not None:
            if sig.ret.sem.kind == "record":
                raise MarshalError(
                    f"{sig.name}: record return values are not supported")
            results.append(un.inline([ret_word], sig.ret.sem))
        return results
    finally:
        packer.free_temps()


# -- server-side skeleton -----------------------------------------------------


def skeleton(sig: LiftedSig, impl: Callable[..., Any], mem: Mem,
             desc: Optional[BindingDesc] = None) -> WordFn:
    """Wrap a host function as a raw word-list closure.

    The implementation receives the in-parameters as host values (declaration
    order) and returns the results in signature order: one value per out
    parameter, then the return value last if the operation is not void.  A
    void operation with no outs may return None.
    """

    expected = abi_arity(sig, desc)

    def stub(words: list[int]) -> int:
        if len(words) != expected:
            raise ArityMismatch(
                f"{sig.name}: expected {expected} argument words, got {len(words)}")
        un = _Unpacker(mem, desc)
        raw: list[tuple[ParamSig, list[int]]] = []
        i = 0
        for p in sig.params:
            width = _param_abi_width(p, desc)
            raw.append((p, words[i:i + width]))
            i += width

        scalars: dict[str, Value] = {}
        for p, ws in raw:
            if p.dir == "in" and p.sem.kind in ("int32", "word32", "handle"):
                scalars[p.name] = un.inline(ws, p.sem)

        in_values: list[Value] = []
        out_slots: list[tuple[ParamSig, int]] = []
        for p, ws in raw:
            if p.dir == "in":
                if p.sem.kind == "array":
                    count = scalars.get(p.sem.len_from)
                    if not isinstance(count, int) or count < 0:
                        raise TypeMismatch(
                            f"{sig.name}.{p.name}: bad element count from "
                            f"{p.sem.len_from}")
                    in_values.append(un.array(ws[0], p.sem.elem, count))
                elif p.byref and p.sem.kind == "record":
                    in_values.append(un.from_block(ws[0], p.sem))
                elif p.byref and p.sem.kind not in ("string8", "string16"):
                    in_values.append(un.inline(mem.read(ws[0], 1), p.sem))
                else:
                    in_values.append(un.inline(ws, p.sem))
            elif p.dir == "inout":
                in_values.append(un.from_block(ws[0], p.sem))
                out_slots.append((p, ws[0]))
            else:
                out_slots.append((p, ws[0]))

        result = impl(*in_values)

        want = len(sig.results)
        if result is None:
            values: tuple[Value, ...] = ()
        elif isinstance(result, tuple):
            values = result
        else:
            values = (result,)
        if len(values) != want:
            raise ArityMismatch(
                f"{sig.name}: implementation returned {len(values)} values, "
                f"signature has {want} results")

        packer = _Packer(mem, desc)
        for (p, addr), v in zip(out_slots, values):
            mem.store(addr, packer.inline(v, p.sem))
        if sig.ret is not None:
            if sig.ret.sem.kind == "record":
                raise MarshalError(
                    f"{sig.name}: record return values are not supported")
            return packer.inline(values[-1], sig.ret.sem)[0]
        return 0

    return stub


# -- client-side binder ---------------------------------------------------------


class BoundInterface:
    """Callable attributes for every operation of one interface."""

    def __init__(self, desc: BindingDesc, name: str, mem: Mem) -> None:
        iface = desc.interface(name)
        if iface.source is None:
            raise MarshalError(f"interface {name!r} has no source library")
        lib = mem.open_library(iface.source)
        self._name = name
        for op in iface.ops:
            if op.kind != "method":
                continue
            sym = mem.get_symbol(lib, op.name)
            setattr(self, op.name, _bound_op(op, sym, mem, desc))

    def __repr__(self) -> str:
        return f"BoundInterface({self._name})"


def _bound_op(sig: LiftedSig, sym: Symbol, mem: Mem, desc: BindingDesc):
    def invoke(*args: Value) -> Value:
        results = call(sig, sym, list(args), mem, desc)
        if not results:
            return None
        if len(results) == 1:
            return results[0]
        return tuple(results)

    invoke.__name__ = sig.name
    return invoke


def bind(desc: BindingDesc, mem: Mem) -> dict[str, BoundInterface]:
    """Bind every interface of a dynamic-mode description to its library."""
    return {i.name: BoundInterface(desc, i.name, mem) for i in desc.interfaces}
