"""COM object model over the virtual ABI.

An interface is a one-word heap block holding the address of its vtable
block; vtable slots are closure addresses with QueryInterface, AddRef and
Release always in slots 0..2.  Reference counting is per object: all of an
object's interfaces share one count, and when it reaches zero every block
the object owns is freed.  QueryInterface for IUnknown returns the same
interface from any starting interface, which makes its address usable as
the object's identity.

The QueryInterface ABI is (this, iid-block-addr, out-slot-addr) -> HRESULT,
with the IID packed as a 4-word block, so the whole model stays callable
through raw memory alone.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from mlidl.wordmem import Mem, WordFn

S_OK = 0x00000000
E_NOTIMPL = 0x80004001
E_NOINTERFACE = 0x80004002
E_FAIL = 0x80004005
CLASS_E_NOAGGREGATION = 0x80040110
REGDB_E_CLASSNOTREG = 0x80040154

_GUID_RE = re.compile(
    r"\{([0-9A-Fa-f]{8})-([0-9A-Fa-f]{4})-([0-9A-Fa-f]{4})-"
    r"([0-9A-Fa-f]{4})-([0-9A-Fa-f]{12})\}"
)


class ComError(Exception):
    hresult = E_FAIL

    def __init__(self, message: str, hresult: Optional[int] = None) -> None:
        super().__init__(message)
        if hresult is not None:
            self.hresult = hresult


class NoInterface(ComError):
    hresult = E_NOINTERFACE


class ClassNotRegistered(ComError):
    hresult = REGDB_E_CLASSNOTREG


class DeadObject(ComError):
    pass


@dataclass(frozen=True, order=True)
class Guid:
    """128-bit identifier, printed `{XXXXXXXX-XXXX-XXXX-XXXX-XXXXXXXXXXXX}`."""

    data1: int  # 32 bits
    data2: int  # 16 bits
    data3: int  # 16 bits
    data4: bytes  # 8 bytes

    @staticmethod
    def parse(text: str) -> "Guid":
        match = _GUID_RE.fullmatch(text.strip())
        if match is None:
            raise ValueError(f"malformed GUID {text!r}")
        g1, g2, g3, g4, g5 = match.groups()
        return Guid(int(g1, 16), int(g2, 16), int(g3, 16),
                    bytes.fromhex(g4 + g5))

    def __str__(self) -> str:
        d4 = self.data4.hex().upper()
        return (f"{{{self.data1:08X}-{self.data2:04X}-{self.data3:04X}-"
                f"{d4[:4]}-{d4[4:]}}}")

    def to_words(self) -> list[int]:
        """4 little-endian words: data1, data2|data3<<16, data4 halves."""
        return [
            self.data1,
            self.data2 | (self.data3 << 16),
            int.from_bytes(self.data4[:4], "little"),
            int.from_bytes(self.data4[4:], "little"),
        ]

    @staticmethod
    def from_words(words: list[int]) -> "Guid":
        if len(words) != 4:
            raise ValueError("a GUID occupies exactly 4 words")
        return Guid(
            words[0] & 0xFFFFFFFF,
            words[1] & 0xFFFF,
            (words[1] >> 16) & 0xFFFF,
            (words[2] & 0xFFFFFFFF).to_bytes(4, "little")
            + (words[3] & 0xFFFFFFFF).to_bytes(4, "little"),
        )


@dataclass(frozen=True)
class Iid:
    """Interface identifier: a Guid witnessing one named interface.

    InterfaceRefs are only ever minted paired with the vtable laid out for
    their Iid (add_interface, query_interface), so holding a ref is holding
    the witness; lookups go by guid and hand back the canonical pairing.
    """

    guid: Guid
    name: str

    def __str__(self) -> str:
        return f"{self.name}:{self.guid}"


@dataclass(frozen=True)
class Clsid:
    guid: Guid
    name: str = ""

    def __str__(self) -> str:
        return str(self.guid)


IID_IUNKNOWN = Iid(Guid.parse("{00000000-0000-0000-C000-000000000046}"), "IUnknown")
IID_IDISPATCH = Iid(Guid.parse("{00020400-0000-0000-C000-000000000046}"), "IDispatch")


@dataclass(frozen=True)
class InterfaceRef:
    """Typed interface pointer: a heap word whose content is the vtable addr."""

    addr: int
    iid: Iid
    owner: "ComObject" = field(compare=False, repr=False)


class ComObject:
    """Refcounted object with one vtable block per supported interface."""

    def __init__(self, mem: Mem, clsid: Optional[Clsid] = None) -> None:
        self.mem = mem
        self.clsid = clsid
        self.refcount = 1
        self.alive = True
        self._interfaces: dict[Guid, InterfaceRef] = {}
        self._blocks: list[int] = []
        self._qi_fn: WordFn = self._raw_query_interface
        self._addref_fn: WordFn = self._raw_add_ref
        self._release_fn: WordFn = self._raw_release
        self.identity = self.add_interface(IID_IUNKNOWN, [])

    # -- construction ----------------------------------------------------------

    def add_interface(self, iid: Iid, methods: list[WordFn]) -> InterfaceRef:
        """Lay out [qi, addref, release] ++ methods and its interface word."""
        self._check_alive()
        if iid.guid in self._interfaces:
            raise ComError(f"interface {iid} already present")
        slots = [self._qi_fn, self._addref_fn, self._release_fn] + list(methods)
        vtable = self.mem.alloc(len(slots))
        self.mem.store(vtable, [self.mem.fun_to_addr(fn) for fn in slots])
        iface = self.mem.alloc(1)
        self.mem.store(iface, [vtable])
        self._blocks += [vtable, iface]
        ref = InterfaceRef(addr=iface, iid=iid, owner=self)
        self._interfaces[iid.guid] = ref
        return ref

    def alias_interface(self, iid: Iid, ref: InterfaceRef) -> None:
        """Answer `iid` with an interface already laid out for another IID."""
        self._check_alive()
        if iid.guid not in self._interfaces:
            self._interfaces[iid.guid] = ref

    @property
    def block_count(self) -> int:
        return len(self._blocks)

    def _check_alive(self) -> None:
        if not self.alive:
            raise DeadObject("object has been destroyed")

    # -- IUnknown semantics -------------------------------------------------------

    def find_interface(self, iid: Iid) -> Optional[InterfaceRef]:
        if iid.guid == IID_IUNKNOWN.guid:
            return self.identity
        return self._interfaces.get(iid.guid)

    def _destroy(self) -> None:
        for addr in self._blocks:
            self.mem.free(addr)
        self._blocks.clear()
        self._interfaces.clear()
        self.alive = False

    # -- raw vtable closures (shared by every interface of the object) ---------

    def _raw_query_interface(self, words: list[int]) -> int:
        if len(words) != 3:
            raise ComError(f"QueryInterface takes 3 words, got {len(words)}")
        _this, iid_addr, out_addr = words
        guid = Guid.from_words(self.mem.read(iid_addr, 4))
        self._check_alive()
        ref = self.find_interface(Iid(guid, "?"))
        if ref is None:
            self.mem.store(out_addr, [0])
            return E_NOINTERFACE
        self.refcount += 1
        self.mem.store(out_addr, [ref.addr])
        return S_OK

    def _raw_add_ref(self, words: list[int]) -> int:
        self._check_alive()
        self.refcount += 1
        return self.refcount

    def _raw_release(self, words: list[int]) -> int:
        self._check_alive()
        self.refcount -= 1
        if self.refcount == 0:
            self._destroy()
        return self.refcount


# -- client-side operations ------------------------------------------------------


def make_interface(methods: list[WordFn], owner: ComObject, iid: Iid) -> InterfaceRef:
    """Add an interface to an object; the IUnknown triple is synthesized."""
    return owner.add_interface(iid, methods)


def get_method(ref: InterfaceRef, index: int) -> WordFn:
    """Slot `index` of the interface's vtable, as a callable."""
    ref.owner._check_alive()
    mem = ref.owner.mem
    vtable = mem.read(ref.addr, 1)[0]
    slot = mem.read(mem.offset(vtable, index), 1)[0]
    return mem.addr_to_fun(slot)


def query_interface(ref: InterfaceRef, iid: Iid) -> InterfaceRef:
    obj = ref.owner
    obj._check_alive()
    found = obj.find_interface(iid)
    if found is None:
        raise NoInterface(f"{iid} not supported")
    obj.refcount += 1
    if iid.guid == IID_IUNKNOWN.guid:
        return obj.identity
    return found


def add_ref(ref: InterfaceRef) -> int:
    obj = ref.owner
    obj._check_alive()
    obj.refcount += 1
    return obj.refcount


def release(ref: InterfaceRef) -> int:
    obj = ref.owner
    obj._check_alive()
    obj.refcount -= 1
    if obj.refcount == 0:
        obj._destroy()
    return obj.refcount


# -- activation ---------------------------------------------------------------


@dataclass
class ClassFactory:
    """Creates instances of one component class."""

    clsid: Clsid
    create: Callable[[Iid], InterfaceRef]
    label: str = ""


class Registry:
    def __init__(self) -> None:
        self._factories: dict[Guid, ClassFactory] = {}

    def dump(self) -> str:
        lines = [f"{factory.clsid.guid} {factory.label or factory.clsid.name}"
                 for factory in self._factories.values()]
        return "\n".join(sorted(lines)) + ("\n" if lines else "")

    @staticmethod
    def load(text: str, factories: dict[str, ClassFactory]) -> "Registry":
        reg = Registry()
        for line in text.splitlines():
            if not line.strip():
                continue
            guid_text, _, label = line.partition(" ")
            factory = factories.get(label)
            if factory is None:
                raise ComError(f"no factory for label {label!r}")
            if str(factory.clsid.guid) != guid_text:
                raise ComError(f"factory {label!r} has CLSID "
                               f"{factory.clsid.guid}, registry says {guid_text}")
            co_register_class_object(reg, factory.clsid, factory)
        return reg


def co_register_class_object(reg: Registry, clsid: Clsid,
                             factory: ClassFactory) -> None:
    if clsid.guid in reg._factories:
        raise ComError(f"class {clsid} is already registered")
    reg._factories[clsid.guid] = factory


def co_unregister_class_object(reg: Registry, clsid: Clsid) -> None:
    if clsid.guid not in reg._factories:
        raise ClassNotRegistered(f"class {clsid} is not registered")
    del reg._factories[clsid.guid]


def co_get_class_object(reg: Registry, clsid: Clsid) -> ClassFactory:
    factory = reg._factories.get(clsid.guid)
    if factory is None:
        raise ClassNotRegistered(f"class {clsid} is not registered")
    return factory


def co_create_instance(reg: Registry, clsid: Clsid, iid: Iid) -> InterfaceRef:
    return co_get_class_object(reg, clsid).create(iid)


def simple_factory(clsid: Clsid, build: Callable[[], ComObject],
                   label: str = "") -> ClassFactory:
    """Factory from an object builder.

    The builder returns a fresh object holding its creation reference; the
    requested interface is taken via QueryInterface and the creation
    reference dropped, so a failed request destroys the partial object and
    leaks nothing.
    """

    def create(iid: Iid) -> InterfaceRef:
        obj = build()
        try:
            ref = query_interface(obj.identity, iid)
        except NoInterface:
            release(obj.identity)
            raise
        release(obj.identity)
        return ref

    return ClassFactory(clsid=clsid, create=create, label=label)
