"""Timestamped announcement and haptic events, plus the session queue.

Announcements stand in for synthesized speech; haptics for device
vibration. Both carry a machine-readable tag so tests and transcripts can
filter without parsing phrase text.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AnnouncementEvent:
    at: float
    tag: str
    text: str

    def transcript_line(self) -> str:
        return f'ANNOUNCE {self.tag} "{self.text}"'


@dataclass(frozen=True)
class HapticEvent:
    at: float
    kind: str = "tap"

    def transcript_line(self) -> str:
        return f"HAPTIC {self.kind}"


Event = AnnouncementEvent | HapticEvent


class EventQueue:
    """Ordered event buffer: by timestamp, ties by emission order."""

    def __init__(self) -> None:
        self._items: list[tuple[float, int, Event]] = []
        self._seq = 0

    def push(self, event: Event) -> None:
        self._items.append((event.at, self._seq, event))
        self._seq += 1

    def __len__(self) -> int:
        return len(self._items)

    def drain(self, up_to: float) -> list[Event]:
        """Remove and return all events with at <= up_to, preserving order."""
        taken = [item for item in self._items if item[0] <= up_to]
        self._items = [item for item in self._items if item[0] > up_to]
        taken.sort(key=lambda item: (item[0], item[1]))
        return [event for _, _, event in taken]

    def drain_all(self) -> list[Event]:
        taken = sorted(self._items, key=lambda item: (item[0], item[1]))
        self._items = []
        return [event for _, _, event in taken]
