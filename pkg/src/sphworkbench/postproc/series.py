"""Scalar time-series extraction over frame sequences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..particles import KIND_CODES, ParticleFrame
from .errors import EmptySelection

__all__ = ["TimeSeries", "Selector", "scalar_series", "PRESETS", "preset_series"]

REDUCERS = ("max", "min", "mean", "count", "extent")
QUANTITIES = ("x", "y", "z", "vx", "vy", "vz", "speed", "rho", "p", "mass")


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray           # (n,) scalar or (n, k) vector samples
    label: str = ""
    units: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.ndim != 1 or self.values.shape[0] != self.times.shape[0]:
            raise ValueError("times and values must have matching leading length")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def to_csv(self) -> str:
        if self.values.ndim == 1:
            header = "time,value"
            rows = (f"{repr(float(t))},{repr(float(v))}"
                    for t, v in zip(self.times, self.values))
        else:
            cols = ",".join(f"value_{i}" for i in range(self.values.shape[1]))
            header = f"time,{cols}"
            rows = (
                repr(float(t)) + "," + ",".join(repr(float(x)) for x in row)
                for t, row in zip(self.times, self.values))
        meta = f"# {self.label} [{self.units}]\n" if self.label or self.units else ""
        return meta + header + "\n" + "\n".join(rows) + "\n"


@dataclass(frozen=True)
class Selector:
    """Particle predicate over kind and/or group id."""

    kind: str | None = None        # fluid | boundary | floating
    group: int | None = None

    def mask(self, frame: ParticleFrame) -> np.ndarray:
        m = np.ones(frame.n, dtype=bool)
        if self.kind is not None:
            m &= frame.kind == KIND_CODES[self.kind]
        if self.group is not None:
            m &= frame.group == self.group
        return m

    def describe(self) -> str:
        parts = []
        if self.kind:
            parts.append(self.kind)
        if self.group is not None:
            parts.append(f"group={self.group}")
        return " ".join(parts) or "all"


def _quantity(frame: ParticleFrame, name: str, mask: np.ndarray) -> np.ndarray:
    if name == "x":
        return frame.pos[mask, 0]
    if name == "y":
        return frame.pos[mask, 1]
    if name == "z":
        return frame.pos[mask, 2]
    if name == "vx":
        return frame.vel[mask, 0]
    if name == "vy":
        return frame.vel[mask, 1]
    if name == "vz":
        return frame.vel[mask, 2]
    if name == "speed":
        return np.linalg.norm(frame.vel[mask], axis=1)
    if name == "rho":
        return frame.rho[mask]
    if name == "p":
        return frame.p[mask]
    if name == "mass":
        return frame.mass[mask]
    raise ValueError(f"unknown quantity {name!r}; have {QUANTITIES}")


def scalar_series(frames: list[ParticleFrame], selector: Selector,
                  reducer: str, quantity: str = "x",
                  offset: float = 0.0, label: str = "", units: str = "m") -> TimeSeries:
    """One reduced value per frame over the selected particles.

    Reducers: max, min, mean, count, extent (max - min along the quantity).
    `offset` is subtracted from every sample (reference shifts move the curve
    without changing its shape).
    """
    if reducer not in REDUCERS:
        raise ValueError(f"unknown reducer {reducer!r}; have {REDUCERS}")
    if not frames:
        raise EmptySelection("no frames given")
    if not selector.mask(frames[0]).any():
        raise EmptySelection(f"selector ({selector.describe()}) matches nothing in frame 0")

    times = np.array([f.time for f in frames])
    values = np.empty(len(frames))
    for i, frame in enumerate(frames):
        mask = selector.mask(frame)
        if not mask.any():
            raise EmptySelection(f"selector matches nothing in frame {i}")
        if reducer == "count":
            values[i] = float(mask.sum())
            continue
        q = _quantity(frame, quantity, mask)
        if reducer == "max":
            values[i] = q.max()
        elif reducer == "min":
            values[i] = q.min()
        elif reducer == "mean":
            values[i] = q.mean()
        else:
            values[i] = q.max() - q.min()
    return TimeSeries(times=times, values=values - offset,
                      label=label or f"{reducer}({quantity}) of {selector.describe()}",
                      units=units)


def _runout(frames, selector):
    ref = float(_quantity(frames[0], "x", selector.mask(frames[0])).max())
    return scalar_series(frames, selector, "max", "x", offset=ref,
                         label="run-out distance", units="m")


def _front(frames, selector):
    return scalar_series(frames, selector, "max", "x",
                         label="front position", units="m")


def _surge(frames, selector):
    return scalar_series(frames, selector, "max", "z",
                         label="surge height", units="m")


def _sinking(frames, selector):
    ref = float(_quantity(frames[0], "z", selector.mask(frames[0])).min())
    series = scalar_series(frames, selector, "min", "z",
                           label="sinking depth", units="m")
    return TimeSeries(times=series.times, values=ref - series.values,
                      label=series.label, units=series.units)


PRESETS = {
    "runout_distance": _runout,
    "front_position": _front,
    "surge_height": _surge,
    "sinking_depth": _sinking,
}


def preset_series(name: str, frames: list[ParticleFrame], selector: Selector) -> TimeSeries:
    try:
        fn = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; have {sorted(PRESETS)}") from None
    return fn(frames, selector)
