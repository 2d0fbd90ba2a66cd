"""Shared generation controls.

A single ``GenControls`` record travels through every generator so that a
run is reproducible from (seed, stream_id) plus the knobs echoed into the
manifest.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .randkit import RngStream


@dataclass(frozen=True)
class GenControls:
    """Knobs governing random instance generation.

    seed/stream_id select the random stream; batch drivers give each
    instance its own stream_id.  ``density`` and ``cond`` shape the
    coefficient matrix, ``norm_b``/``norm_c`` rescale the certified
    solutions so the assembled right-hand side and cost hit a target norm,
    ``margin`` is the floor used wherever a strict inequality must be
    bounded away from zero, and ``eigen_floor`` bounds interior spectra.
    """

    seed: int = 0
    stream_id: int = 0
    density: float | None = None
    cond: float | None = None
    norm_b: float | None = None
    norm_c: float | None = None
    margin: float = 0.1
    eigen_floor: float = 0.1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        if self.cond is not None and self.cond < 1.0:
            raise ValueError(f"cond must be >= 1, got {self.cond}")
        if self.margin <= 0.0:
            raise ValueError("margin must be positive")
        if self.eigen_floor < 0.0:
            raise ValueError("eigen_floor must be nonnegative")

    def stream(self) -> RngStream:
        return RngStream(self.seed, self.stream_id)

    def with_stream_id(self, stream_id: int) -> "GenControls":
        d = asdict(self)
        d["stream_id"] = stream_id
        return GenControls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d
