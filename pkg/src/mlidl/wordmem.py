"""Virtual ABI: a word-addressed heap, a closure registry, and symbol libraries.

Everything that crosses the binding boundary is a 32-bit word.  A foreign
function is a ``word list -> word`` callable; its "code address" is an entry
in the closure registry, not machine code.  Addresses are plain ints split
into three regions:

    0                       the null address
    [0x1000, 0x8000000)     heap data (word-aligned, 4 bytes per word)
    [0x8000000, ...)        closure registry ("code")

Heap allocations are page-granular internally so that any address can be
mapped back to its allocation in O(1); reads and stores are bounds-checked
against the owning allocation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

WORD_MASK = 0xFFFFFFFF
WORD_BYTES = 4

NULL_ADDR = 0
HEAP_BASE = 0x1000
CLOSURE_BASE = 0x8000000

_PAGE_BYTES = 0x1000
_PAGE_WORDS = _PAGE_BYTES // WORD_BYTES

WordFn = Callable[[list[int]], int]


def word(value: int) -> int:
    """Truncate an int to an unsigned 32-bit word."""
    return value & WORD_MASK


def to_signed(w: int) -> int:
    """Reinterpret a 32-bit word as a signed int."""
    w &= WORD_MASK
    return w - 0x100000000 if w >= 0x80000000 else w


class MemFault(Exception):
    """Base class for virtual-ABI faults."""


class BadSize(MemFault):
    pass


class BadRegion(MemFault):
    pass


class DoubleFree(MemFault):
    pass


class UseAfterFree(MemFault):
    pass


class OutOfBounds(MemFault):
    pass


class NotCallable(MemFault):
    pass


class UnknownLibrary(MemFault):
    pass


class UnknownSymbol(MemFault):
    pass


def region_of(addr: int) -> str:
    """Classify an address: 'null', 'heap' or 'closure'.

    Every nonzero address below the closure base counts as heap; whether it
    maps to a live allocation is checked at read/store time.
    """
    if addr == NULL_ADDR:
        return "null"
    if addr >= CLOSURE_BASE:
        return "closure"
    return "heap"


@dataclass
class Allocation:
    base: int
    size: int          # words
    live: bool
    cells: list[int]


@dataclass(frozen=True)
class Symbol:
    name: str
    addr: int
    convention: str    # "pascal" | "cdecl"
    arity: Optional[int]


@dataclass
class Library:
    name: str
    symbols: dict[str, Symbol] = field(default_factory=dict)


class Mem:
    """One mutable world: heap + closure table + library registry.

    All operations on one world are externally serialized (single-threaded
    contract); distinct worlds are fully independent.
    """

    def __init__(self, trace: Optional[Callable[[str], None]] = None) -> None:
        self._pages: dict[int, Allocation] = {}
        self._next_page = 0
        self._live = 0
        self._closures: dict[int, WordFn] = {}
        self._closure_addrs: dict[int, int] = {}   # id(fn) -> addr
        self._closure_keep: list[WordFn] = []      # keeps id() keys stable
        self._next_closure = CLOSURE_BASE
        self._libraries: dict[str, Library] = {}
        self._trace = trace

    # -- heap ------------------------------------------------------------

    @property
    def live_count(self) -> int:
        return self._live

    def live_blocks(self) -> list[int]:
        seen: list[int] = []
        for alloc in self._pages.values():
            if alloc.live and alloc.base not in seen:
                seen.append(alloc.base)
        return sorted(seen)

    def alloc(self, nwords: int) -> int:
        if nwords <= 0:
            raise BadSize(f"alloc of {nwords} words")
        npages = (nwords + _PAGE_WORDS - 1) // _PAGE_WORDS
        base = HEAP_BASE + self._next_page * _PAGE_BYTES
        if base + npages * _PAGE_BYTES > CLOSURE_BASE:
            raise BadSize("heap region exhausted")
        alloc = Allocation(base=base, size=nwords, live=True, cells=[0] * nwords)
        for i in range(npages):
            self._pages[self._next_page + i] = alloc
        self._next_page += npages
        self._live += 1
        self._emit(f"alloc {nwords} -> {base:#x}")
        return base

    def _find(self, addr: int) -> tuple[Allocation, int]:
        """Map an address to (allocation, word index); check liveness."""
        if region_of(addr) != "heap":
            raise BadRegion(f"address {addr:#x} is not a heap address")
        if addr % WORD_BYTES:
            raise OutOfBounds(f"address {addr:#x} is not word-aligned")
        page = (addr - HEAP_BASE) // _PAGE_BYTES
        alloc = self._pages.get(page)
        if alloc is None:
            raise OutOfBounds(f"address {addr:#x} outside any allocation")
        idx = (addr - alloc.base) // WORD_BYTES
        if idx >= alloc.size:
            raise OutOfBounds(
                f"address {addr:#x} past the end of allocation {alloc.base:#x}"
            )
        if not alloc.live:
            raise UseAfterFree(f"address {addr:#x} in freed allocation {alloc.base:#x}")
        return alloc, idx

    def free(self, addr: int) -> None:
        reg = region_of(addr)
        if reg != "heap":
            raise BadRegion(f"free of {reg} address {addr:#x}")
        page = (addr - HEAP_BASE) // _PAGE_BYTES
        alloc = self._pages.get(page)
        if alloc is None or alloc.base != addr:
            raise OutOfBounds(f"free of {addr:#x}, which is not an allocation base")
        if not alloc.live:
            raise DoubleFree(f"double free of {addr:#x}")
        alloc.live = False
        self._live -= 1
        self._emit(f"free {addr:#x}")

    def offset(self, addr: int, nwords: int) -> int:
        """Address `nwords` words past `addr`; checked only at read/store."""
        return addr + nwords * WORD_BYTES

    def store(self, addr: int, words: list[int]) -> None:
        if not words:
            return
        alloc, idx = self._find(addr)
        if idx + len(words) > alloc.size:
            raise OutOfBounds(
                f"store of {len(words)} words at {addr:#x} overruns "
                f"allocation {alloc.base:#x} ({alloc.size} words)"
            )
        for i, w in enumerate(words):
            alloc.cells[idx + i] = word(w)
        self._emit(f"store {addr:#x} {[hex(word(w)) for w in words]}")

    def read(self, addr: int, nwords: int) -> list[int]:
        if nwords < 0:
            raise BadSize(f"read of {nwords} words")
        if nwords == 0:
            return []
        alloc, idx = self._find(addr)
        if idx + nwords > alloc.size:
            raise OutOfBounds(
                f"read of {nwords} words at {addr:#x} overruns "
                f"allocation {alloc.base:#x} ({alloc.size} words)"
            )
        out = alloc.cells[idx:idx + nwords]
        self._emit(f"read {addr:#x} {nwords} -> {[hex(w) for w in out]}")
        return out

    # -- closures ---------------------------------------------------------

    def fun_to_addr(self, fn: WordFn) -> int:
        """Register a ``word list -> word`` callable; idempotent per identity."""
        key = id(fn)
        addr = self._closure_addrs.get(key)
        if addr is not None and self._closures.get(addr) is fn:
            return addr
        addr = self._next_closure
        self._next_closure += WORD_BYTES
        self._closures[addr] = fn
        self._closure_addrs[key] = addr
        self._closure_keep.append(fn)
        return addr

    def addr_to_fun(self, addr: int) -> WordFn:
        fn = self._closures.get(addr)
        if fn is None:
            raise NotCallable(f"address {addr:#x} is not a registered closure")
        return fn

    def call(self, addr: int, args: list[int]) -> int:
        """Invoke a closure address with raw word arguments."""
        result = word(self.addr_to_fun(addr)(list(args)))
        self._emit(f"call {addr:#x} {args} -> {result:#x}")
        return result

    # -- libraries ----------------------------------------------------------

    def register_library(self, name: str) -> Library:
        lib = self._libraries.get(name)
        if lib is None:
            lib = Library(name=name)
            self._libraries[name] = lib
        return lib

    def register_function(
        self,
        lib: Library,
        name: str,
        fn: WordFn,
        convention: str = "pascal",
        arity: Optional[int] = None,
    ) -> Symbol:
        sym = Symbol(name=name, addr=self.fun_to_addr(fn), convention=convention, arity=arity)
        lib.symbols[name] = sym
        return sym

    def open_library(self, name: str) -> Library:
        lib = self._libraries.get(name)
        if lib is None:
            raise UnknownLibrary(f"unknown library {name!r}")
        return lib

    def get_function(self, lib: Library, name: str) -> int:
        sym = lib.symbols.get(name)
        if sym is None:
            raise UnknownSymbol(f"no symbol {name!r} in library {lib.name!r}")
        return sym.addr

    def get_symbol(self, lib: Library, name: str) -> Symbol:
        sym = lib.symbols.get(name)
        if sym is None:
            raise UnknownSymbol(f"no symbol {name!r} in library {lib.name!r}")
        return sym

    # -- trace ----------------------------------------------------------------

    def _emit(self, line: str) -> None:
        if self._trace is not None:
            self._trace(line)
