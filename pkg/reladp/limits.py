"""Shared deadline for the proof search and the loop search."""

import threading
import time

from reladp.errors import ProverTimeout


class Deadline:
    def __init__(self, seconds=None):
        self.expires = None if seconds is None else time.monotonic() + seconds
        self._cancelled = threading.Event()

    def cancel(self):
        self._cancelled.set()

    @property
    def cancelled(self):
        return self._cancelled.is_set()

    def expired(self):
        if self._cancelled.is_set():
            return True
        return self.expires is not None and time.monotonic() >= self.expires

    def check(self):
        if self.expired():
            raise ProverTimeout("cancelled" if self.cancelled else "deadline passed")


NO_DEADLINE = Deadline()
