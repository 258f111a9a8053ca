"""Cooperative wall-clock deadlines."""

from __future__ import annotations

import time

from .errors import BudgetExceeded


class Deadline:
    """Checked at enumeration boundaries; ``None`` budget never expires."""

    def __init__(self, budget_ms: int | None = None):
        self.budget_ms = budget_ms
        self._expires = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0

    def expired(self) -> bool:
        return self._expires is not None and time.monotonic() >= self._expires

    def check(self) -> None:
        if self.expired():
            raise BudgetExceeded()


NEVER = Deadline(None)
