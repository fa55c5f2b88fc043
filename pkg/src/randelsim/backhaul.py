"""RAN-to-core link model: latency, FIFO serialization, loss, outages."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field


@dataclass
class BackhaulProfile:
    base_latency_ms: int
    bandwidth_bps: int
    jitter_ms: int = 0
    loss_probability: float = 0.0
    outages: list[tuple[int, int]] = field(default_factory=list)

    def validate(self) -> None:
        if self.bandwidth_bps <= 0:
            raise ValueError("bandwidth_bps must be > 0")
        if self.base_latency_ms < 0:
            raise ValueError("base_latency_ms must be >= 0")
        if self.jitter_ms < 0:
            raise ValueError("jitter_ms must be >= 0")
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError("loss_probability must be within [0, 1]")
        prev_end = None
        for iv in self.outages:
            if len(iv) != 2 or iv[0] >= iv[1]:
                raise ValueError("outages: each interval must be [start, end) with start < end")
            if prev_end is not None and iv[0] < prev_end:
                raise ValueError("outages: intervals must be disjoint and sorted")
            prev_end = iv[1]

    def in_outage(self, t: int) -> bool:
        return any(start <= t < end for start, end in self.outages)


class BackhaulLink:
    """Half-duplex FIFO link. Byte counters increment on send even when lost."""

    def __init__(self, profile: BackhaulProfile, rng: random.Random):
        profile.validate()
        self.profile = profile
        self._rng = rng
        self._busy_until = 0
        self.bytes_total = 0
        self.msg_total = 0
        self._send_log: deque[tuple[int, int]] = deque()  # (time, bytes)

    def serialization_ms(self, size: int) -> int:
        return math.ceil(size * 1000 / self.profile.bandwidth_bps)

    def transmit(self, size: int, at: int) -> int | None:
        """Return the delivery time, or None if the message is lost."""
        self.bytes_total += size
        self.msg_total += 1
        self._send_log.append((at, size))
        p = self.profile
        if p.in_outage(at):
            return None
        if p.loss_probability > 0 and self._rng.random() < p.loss_probability:
            return None
        start = max(at, self._busy_until)
        self._busy_until = start + self.serialization_ms(size)
        jitter = self._rng.randint(-p.jitter_ms, p.jitter_ms) if p.jitter_ms else 0
        delivery = self._busy_until + p.base_latency_ms + jitter
        # a message in flight when the link goes down is lost with it
        if p.in_outage(delivery):
            return None
        return delivery

    def utilization(self, now: int, window: int) -> int:
        """Bytes sent within [now - window, now]."""
        if window <= 0:
            raise ValueError("window must be > 0")
        while self._send_log and self._send_log[0][0] < now - window:
            self._send_log.popleft()
        return sum(size for t, size in self._send_log if now - window <= t <= now)
