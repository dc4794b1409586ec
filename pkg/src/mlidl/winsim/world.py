"""The simulated window system.

One SimWorld holds the class registry, windows, a FIFO message queue, the
timer table and an append-only trace.  Time is a discrete tick counter;
every tick the pump fires due timers and then drains the queue, dispatching
each message to its window's wndproc through the closure registry.  GDI and
the other painting-adjacent calls never fail: they append a trace entry and
hand out fresh opaque handles.

Trace lines, one event per line (the golden-test artifact):

    TICK <n> MSG <hwnd> <code> <wparam> <lparam>
    TICK <n> DRAW <op> <args...>
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from mlidl.wordmem import Mem, word

WM_NULL = 0x0
WM_CREATE = 0x1
WM_DESTROY = 0x2
WM_MOVE = 0x3
WM_SIZE = 0x5
WM_SETFOCUS = 0x7
WM_PAINT = 0xF
WM_TIMER = 0x113

CW_USEDEFAULT = 0x80000000

MS_PER_TICK = 20

# intrinsic sizes for LoadImageA, keyed by asset name; the logo's size must
# agree with the totals the demo program hard-codes
DEFAULT_ASSETS = {"smlnj.bmp": (158, 131)}


class PumpError(Exception):
    """A wndproc failed; carries the message being dispatched."""

    def __init__(self, msg: "Msg", cause: BaseException) -> None:
        super().__init__(f"wndproc failed on {msg}: {cause}")
        self.msg = msg
        self.cause = cause


@dataclass
class WndClass:
    name: str
    atom: int
    wndproc_addr: int
    style: int
    details: dict[str, Any] = field(default_factory=dict)


@dataclass
class Window:
    hwnd: int
    class_name: str
    title: str
    rect: tuple[int, int, int, int]    # x, y, w, h
    visible: bool = False
    destroyed: bool = False


@dataclass(frozen=True)
class Msg:
    hwnd: int
    code: int
    wparam: int
    lparam: int
    tick: int


@dataclass
class Timer:
    hwnd: int
    timer_id: int
    period: int        # ticks
    start_tick: int
    cb_addr: int = 0


def _render_arg(v: Any) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if v is None:
        return "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, dict):
        inner = ",".join(f"{k}={_render_arg(x)}" for k, x in v.items())
        return "{" + inner + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_render_arg(x) for x in v) + "]"
    if callable(v):
        return "<fn>"
    return repr(v)


class SimWorld:
    """Deterministic window-system state over one memory world."""

    def __init__(self, mem: Mem,
                 assets: Optional[Mapping[str, tuple[int, int]]] = None) -> None:
        self.mem = mem
        self.classes: dict[str, WndClass] = {}
        self.windows: dict[int, Window] = {}
        self.queue: deque[Msg] = deque()
        self.timers: dict[tuple[int, int], Timer] = {}
        self.tick = 0
        self.trace: list[str] = []
        self.quit_code: Optional[int] = None
        self.assets = dict(DEFAULT_ASSETS)
        if assets:
            self.assets.update(assets)
        self.images: dict[int, tuple[int, int]] = {}
        self._next_handle = 1

    # -- plumbing ---------------------------------------------------------------

    def fresh_handle(self) -> int:
        h = self._next_handle
        self._next_handle += 1
        return h

    def record(self, op: str, args: list[Any]) -> None:
        rendered = " ".join(_render_arg(a) for a in args)
        self.trace.append(f"TICK {self.tick} DRAW {op} {rendered}".rstrip())

    def gdi_record(self, op: str, args: list[Any],
                   ret: Optional[int] = None) -> int:
        """Record a never-failing call; fresh nonzero handle unless given."""
        self.record(op, args)
        return self.fresh_handle() if ret is None else ret

    def trace_text(self) -> str:
        return "\n".join(self.trace) + ("\n" if self.trace else "")

    def _dispatch(self, msg: Msg) -> Optional[int]:
        window = self.windows.get(msg.hwnd)
        if window is None or window.destroyed:
            return None
        cls = self.classes.get(window.class_name)
        if cls is None:
            return None
        self.trace.append(
            f"TICK {self.tick} MSG {msg.hwnd} {msg.code} "
            f"{word(msg.wparam)} {word(msg.lparam)}")
        fn = self.mem.addr_to_fun(cls.wndproc_addr)
        try:
            ret = fn([word(msg.hwnd), word(msg.code),
                      word(msg.wparam), word(msg.lparam)])
        except PumpError:
            raise
        except BaseException as exc:
            raise PumpError(msg, exc) from exc
        if msg.code == WM_DESTROY:
            window.destroyed = True
        return ret

    # -- classes and windows --------------------------------------------------

    def register_class_ex(self, wndclass: Mapping[str, Any]) -> int:
        name = wndclass["lpszClassName"]
        if name in self.classes:
            return 0
        wndproc = wndclass["lpfnWndProc"]
        if not callable(wndproc):
            return 0
        atom = self.fresh_handle()
        self.classes[name] = WndClass(
            name=name,
            atom=atom,
            wndproc_addr=self.mem.fun_to_addr(wndproc),
            style=int(wndclass.get("style", 0)),
            details=dict(wndclass),
        )
        return atom

    RegisterClassExA = register_class_ex

    def unregister_class(self, class_name: str, hinstance: int) -> bool:
        if class_name not in self.classes:
            return False
        del self.classes[class_name]
        return True

    UnregisterClassA = unregister_class

    def create_window_ex(self, exstyle: int, classname: str, windowname: str,
                         style: int, x: int, y: int, w: int, h: int,
                         parent: int, menu: int, hinstance: int,
                         param: int) -> int:
        if classname not in self.classes:
            return 0
        if word(x) == CW_USEDEFAULT:
            x = 0
        if word(y) == CW_USEDEFAULT:
            y = 0
        hwnd = self.fresh_handle()
        self.windows[hwnd] = Window(hwnd=hwnd, class_name=classname,
                                    title=windowname, rect=(x, y, w, h))
        self._dispatch(Msg(hwnd, WM_CREATE, 0, 0, self.tick))
        size_lparam = ((word(h) & 0xFFFF) << 16) | (word(w) & 0xFFFF)
        self._dispatch(Msg(hwnd, WM_SIZE, 0, size_lparam, self.tick))
        return hwnd

    CreateWindowExA = create_window_ex

    # -- timers, queue, loop ------------------------------------------------------

    def set_timer(self, hwnd: int, timer_id: int, period_ms: int,
                  cb: Any = None) -> int:
        period = max(1, -(-int(period_ms) // MS_PER_TICK))
        cb_addr = self.mem.fun_to_addr(cb) if callable(cb) else 0
        self.timers[(hwnd, timer_id)] = Timer(
            hwnd=hwnd, timer_id=timer_id, period=period,
            start_tick=self.tick, cb_addr=cb_addr)
        self.record("SetTimer", [hwnd, timer_id, period_ms, cb_addr])
        return timer_id

    SetTimer = set_timer

    def kill_timer(self, hwnd: int, timer_id: int) -> bool:
        found = self.timers.pop((hwnd, timer_id), None) is not None
        self.record("KillTimer", [hwnd, timer_id])
        return found

    KillTimer = kill_timer

    def post_message(self, hwnd: int, code: int, wparam: int,
                     lparam: int) -> bool:
        self.queue.append(Msg(hwnd, code, wparam, lparam, self.tick))
        return True

    PostMessageA = post_message

    def post_quit_message(self, code: int) -> None:
        self.quit_code = int(code)
        self.record("PostQuitMessage", [code])

    PostQuitMessage = post_quit_message

    def def_window_proc(self, hwnd: int, code: int, wparam: int,
                        lparam: int) -> int:
        if code == WM_DESTROY:
            window = self.windows.get(hwnd)
            if window is not None:
                window.destroyed = True
        self.record("DefWindowProcA", [hwnd, code, wparam, lparam])
        return 0

    DefWindowProcA = def_window_proc

    def pump(self, max_ticks: int) -> Optional[int]:
        """Run up to `max_ticks` ticks; stop early when the quit flag is set.

        Per tick: fire due timers (registration order), then drain the queue,
        dispatching each message; a message enqueued during the drain is
        delivered in the same tick.
        """
        for _ in range(max_ticks):
            if self.quit_code is not None:
                return self.quit_code
            self.tick += 1
            for timer in list(self.timers.values()):
                elapsed = self.tick - timer.start_tick
                if elapsed > 0 and elapsed % timer.period == 0:
                    self.queue.append(Msg(timer.hwnd, WM_TIMER, timer.timer_id,
                                          timer.cb_addr, self.tick))
            while self.queue:
                self._dispatch(self.queue.popleft())
                if self.quit_code is not None:
                    return self.quit_code
        if self.quit_code is not None:
            return self.quit_code
        return None

    # -- trace-only user calls ----------------------------------------------------

    def show_window(self, hwnd: int, cmdshow: int) -> bool:
        window = self.windows.get(hwnd)
        if window is not None:
            window.visible = cmdshow != 0
        self.record("ShowWindow", [hwnd, cmdshow])
        return True

    ShowWindow = show_window

    def update_window(self, hwnd: int) -> bool:
        self.record("UpdateWindow", [hwnd])
        return True

    UpdateWindow = update_window

    def set_foreground_window(self, hwnd: int) -> bool:
        self.record("SetForegroundWindow", [hwnd])
        return True

    SetForegroundWindow = set_foreground_window

    def begin_paint(self, hwnd: int) -> tuple[dict[str, Any], int]:
        window = self.windows.get(hwnd)
        w, h = (window.rect[2], window.rect[3]) if window else (0, 0)
        hdc = self.gdi_record("BeginPaint", [hwnd])
        ps = {"hdc": hdc, "fErase": False,
              "rcPaint": {"left": 0, "top": 0, "right": w, "bottom": h}}
        return ps, hdc

    BeginPaint = begin_paint

    def end_paint(self, hwnd: int, ps: dict[str, Any]) -> bool:
        self.record("EndPaint", [hwnd, ps])
        return True

    EndPaint = end_paint

    def load_icon(self, h: int, name: str) -> int:
        return self.gdi_record("LoadIconA", [h, name])

    LoadIconA = load_icon

    def load_cursor(self, h: int, name: str) -> int:
        return self.gdi_record("LoadCursorA", [h, name])

    LoadCursorA = load_cursor

    def load_image(self, h: int, name: str, image_type: int, cx: int, cy: int,
                   load_flags: int) -> int:
        handle = self.gdi_record("LoadImageA",
                                 [h, name, image_type, cx, cy, load_flags])
        self.images[handle] = self.assets.get(name, (cx, cy))
        return handle

    LoadImageA = load_image

    def get_dc(self, hwnd: int) -> int:
        return self.gdi_record("GetDC", [hwnd])

    GetDC = get_dc

    def release_dc(self, hwnd: int, hdc: int) -> int:
        return self.gdi_record("ReleaseDC", [hwnd, hdc], ret=1)

    ReleaseDC = release_dc

    # -- gdi ----------------------------------------------------------------------

    def line_to(self, hdc: int, x: int, y: int) -> bool:
        self.record("LineTo", [hdc, x, y])
        return True

    LineTo = line_to

    def poly_line_to(self, hdc: int, points: list, count: int) -> bool:
        self.record("PolyLineTo", [hdc, points, count])
        return True

    PolyLineTo = poly_line_to

    def create_compatible_dc(self, hdc: int) -> int:
        return self.gdi_record("CreateCompatibleDC", [hdc])

    CreateCompatibleDC = create_compatible_dc

    def select_object(self, hdc: int, handle: int) -> int:
        return self.gdi_record("SelectObject", [hdc, handle])

    SelectObject = select_object

    def bit_blt(self, hdc_dest: int, x: int, y: int, w: int, h: int,
                hdc_src: int, x_src: int, y_src: int, rop: int) -> bool:
        self.record("BitBlt", [hdc_dest, x, y, w, h, hdc_src, x_src, y_src, rop])
        return True

    BitBlt = bit_blt

    def delete_object(self, handle: int) -> bool:
        self.record("DeleteObject", [handle])
        return handle != 0

    DeleteObject = delete_object

    def delete_dc(self, hdc: int) -> bool:
        self.record("DeleteDC", [hdc])
        return True

    DeleteDC = delete_dc

    def get_stock_object(self, index: int) -> int:
        return self.gdi_record("GetStockObject", [index])

    GetStockObject = get_stock_object
