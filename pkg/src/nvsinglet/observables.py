"""The two measurement channels and the red/blue contrast between them."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .sequence import SequenceReport

CONTRAST_EPS = 1e-12


class ObservableChannel(str, enum.Enum):
    POPULATION = "population"
    PHOTOCURRENT = "photocurrent"


def nv_minus_population(report: SequenceReport) -> float:
    """NV- fraction just before the readout pulse."""
    return report.pre_readout_state.nv_minus


def nv_zero_population(report: SequenceReport) -> float:
    return report.pre_readout_state.nv_zero


def pc_signal(report: SequenceReport) -> float:
    if not report.has_collect_step:
        raise ValueError("sequence has no photocurrent collection step")
    return report.total_pc


def extract(report: SequenceReport, channel: ObservableChannel | str) -> float:
    channel = ObservableChannel(channel)
    if channel is ObservableChannel.POPULATION:
        return nv_minus_population(report)
    return pc_signal(report)


def contrast(y_red: float, y_blue: float, channel: ObservableChannel | str) -> float:
    """Signed contrast, positive when singlet ionization shows up.

    Population drops under the red hypothesis, photocurrent rises.
    """
    channel = ObservableChannel(channel)
    denom = max(y_blue, CONTRAST_EPS)
    if channel is ObservableChannel.POPULATION:
        return (y_blue - y_red) / denom
    return (y_red - y_blue) / denom


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y_red: float
    y_blue: float
    contrast: float

    def __post_init__(self):
        if not (np.isfinite(self.y_red) and np.isfinite(self.y_blue)):
            raise ValueError(f"non-finite observable at x={self.x}")

    @classmethod
    def from_values(cls, x, y_red, y_blue, channel) -> CurvePoint:
        return cls(float(x), float(y_red), float(y_blue), contrast(y_red, y_blue, channel))
