"""Structured result records shared across modules."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class BoundReport:
    """A named bound split into first/second/third-order contributions (nats).

    ``total`` is always the exact float sum of the three terms; ``constants``
    carries the scalar constants entering the bound and ``witnesses`` any
    optimizer artifacts (achieving encoders, channels, distributions).
    """

    name: str
    first_order: float
    second_order: float = 0.0
    third_order: float = 0.0
    constants: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "total", self.first_order + self.second_order + self.third_order
        )

    def rows(self):
        """Deterministically ordered (key, value) pairs for report rendering."""
        out = [
            ("name", self.name),
            ("first_order", self.first_order),
            ("second_order", self.second_order),
            ("third_order", self.third_order),
            ("total", self.total),
        ]
        for key in sorted(self.constants):
            out.append((f"constants.{key}", self.constants[key]))
        return out
