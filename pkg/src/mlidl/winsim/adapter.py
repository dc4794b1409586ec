"""Queue-backed wndproc: state threading instead of mutable cells.

The returned wndproc sends its 4-word message over a rendezvous queue and
blocks for the reply; a single worker thread receives the messages and
threads a state value through a step function
``handler(state, (hwnd, code, wparam, lparam)) -> (state, return_word)``.

Contract: the message pump must never run on the worker thread itself, or
the rendezvous deadlocks.  A handler failure is re-raised in the blocked
caller as AdapterError; the worker stays alive with its state unchanged.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from queue import Queue
from typing import Any, Callable

from mlidl.wordmem import WordFn

Handler = Callable[[Any, tuple[int, int, int, int]], tuple[Any, int]]

_STOP = object()


@dataclass
class _Failure:
    exc: BaseException


class AdapterError(Exception):
    pass


class AdapterWorker:
    """Owns the worker thread and the state it threads between messages."""

    def __init__(self, handler: Handler, initial_state: Any) -> None:
        self.requests: Queue = Queue(maxsize=1)
        self.replies: Queue = Queue(maxsize=1)
        self.state = initial_state
        self.messages_handled = 0
        self._handler = handler
        self._thread = threading.Thread(target=self._run, daemon=True,
                                        name="wndproc-worker")

    def start(self) -> "AdapterWorker":
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._thread.is_alive():
            self.requests.put(_STOP)
            self._thread.join()

    def _run(self) -> None:
        while True:
            msg = self.requests.get()
            if msg is _STOP:
                return
            try:
                self.state, ret = self._handler(self.state, msg)
            except BaseException as exc:
                self.replies.put(_Failure(exc))
                continue
            self.messages_handled += 1
            self.replies.put(ret)


def wndproc_queue_adapter(handler: Handler,
                          initial_state: Any) -> tuple[WordFn, AdapterWorker]:
    """Build (wndproc, worker); start the worker before pumping messages."""
    worker = AdapterWorker(handler, initial_state)

    def wndproc(words: list[int]) -> int:
        if len(words) != 4:
            raise AdapterError(f"wndproc takes 4 words, got {len(words)}")
        worker.requests.put((words[0], words[1], words[2], words[3]))
        reply = worker.replies.get()
        if isinstance(reply, _Failure):
            raise AdapterError(f"wndproc worker failed: {reply.exc}") from reply.exc
        return reply

    return wndproc, worker
