"""Piecewise-constant control schedules and their propagators."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError, NotHermitian
from .matrix_io import from_json_obj, to_json_obj
from .numerics import DEFAULT_TOL, is_hermitian, mat_exp


@dataclass(frozen=True)
class ControlSchedule:
    """Segments (H, dt) applied in order; the first segment acts first."""
    segments: tuple

    def __post_init__(self):
        segs = []
        D = None
        for H, dt in self.segments:
            H = np.asarray(H, dtype=complex)
            dt = float(dt)
            if H.ndim != 2 or H.shape[0] != H.shape[1]:
                raise DimensionMismatch("segment Hamiltonians must be square")
            if D is None:
                D = H.shape[0]
            elif H.shape[0] != D:
                raise DimensionMismatch("all segment Hamiltonians must share one dimension")
            if not (dt > 0 and np.isfinite(dt)):
                raise InputError(f"segment durations must be positive and finite, got {dt}")
            if not is_hermitian(H, DEFAULT_TOL.eq_tol * max(1.0, np.abs(H).max())):
                raise NotHermitian("segment Hamiltonians must be Hermitian")
            segs.append((H, dt))
        object.__setattr__(self, "segments", tuple(segs))

    @classmethod
    def of(cls, pairs):
        return cls(tuple(pairs))

    @property
    def dim(self):
        return self.segments[0][0].shape[0] if self.segments else None

    @property
    def total_time(self) -> float:
        return float(sum(dt for _, dt in self.segments))

    def __len__(self):
        return len(self.segments)

    def shifted(self, fn):
        """New schedule with H replaced by fn(H) per segment."""
        return ControlSchedule(tuple((fn(H), dt) for H, dt in self.segments))

    def to_json_obj(self):
        return {"segments": [{"h": to_json_obj(H), "dt": dt} for H, dt in self.segments]}

    @classmethod
    def from_json_obj(cls, obj):
        try:
            segs = obj["segments"]
            return cls(tuple((from_json_obj(s["h"]), float(s["dt"])) for s in segs))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed schedule JSON: {exc}") from exc


def load_schedule(path) -> ControlSchedule:
    with open(path) as fh:
        return ControlSchedule.from_json_obj(json.load(fh))


def segment_unitary(H, dt):
    return mat_exp(-1j * dt * np.asarray(H, dtype=complex))


def propagate(schedule: ControlSchedule, dim: int | None = None) -> np.ndarray:
    """Time-ordered product, earliest segment rightmost."""
    if not schedule.segments:
        if dim is None:
            raise InputError("empty schedule needs an explicit dimension")
        return np.eye(dim, dtype=complex)
    U = np.eye(schedule.dim, dtype=complex)
    for H, dt in schedule.segments:
        U = segment_unitary(H, dt) @ U
    return U


def common_refinement(sa: ControlSchedule, sb: ControlSchedule):
    """Resample two schedules of equal total time onto shared breakpoints.

    Returns (H_A, H_B, dt) triples.
    """
    Ta, Tb = sa.total_time, sb.total_time
    if not np.isclose(Ta, Tb, rtol=1e-12, atol=1e-12):
        raise InputError(f"schedules have different total times {Ta} and {Tb}")
    ea = np.cumsum([dt for _, dt in sa.segments])
    eb = np.cumsum([dt for _, dt in sb.segments])
    cuts = np.unique(np.concatenate([ea, eb * (Ta / Tb)]))
    # merge breakpoints closer than rounding
    keep = [cuts[0]]
    for c in cuts[1:]:
        if c - keep[-1] > 1e-13 * max(1.0, Ta):
            keep.append(c)
    keep[-1] = Ta
    out = []
    prev = 0.0
    for c in keep:
        mid = 0.5 * (prev + c)
        ia = min(int(np.searchsorted(ea, mid)), len(ea) - 1)
        ib = min(int(np.searchsorted(eb * (Ta / Tb), mid)), len(eb) - 1)
        out.append((sa.segments[ia][0], sb.segments[ib][0], c - prev))
        prev = c
    return out
