"""Measurable regions of scalar-component space used as samples of universes.

Each region lives in R^d, with d the ray dimension of the field, and has a
closed-form Lebesgue measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np


class DegenerateRegionError(ValueError):
    """Region with zero or infinite Lebesgue measure, or wrong dimension."""


def ball_volume(d: int, r: float = 1.0) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d


def _finite_positive(name: str, x: float) -> None:
    if not (math.isfinite(x) and x > 0):
        raise DegenerateRegionError(f"{name} must be positive and finite, got {x}")


@dataclass(frozen=True)
class Ball:
    radius: float = 1.0

    def validate(self, d: int) -> None:
        _finite_positive("radius", self.radius)

    def measure(self, d: int) -> float:
        self.validate(d)
        return ball_volume(d, self.radius)

    def bounding_box(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        return np.full(d, -self.radius), np.full(d, self.radius)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return np.sum(pts * pts, axis=-1) <= self.radius ** 2

    def to_json(self) -> dict:
        return {"shape": "ball", "radius": self.radius}


@dataclass(frozen=True)
class Annulus:
    r_in: float = 1.0
    r_out: float = 2.0

    def validate(self, d: int) -> None:
        _finite_positive("r_in", self.r_in)
        _finite_positive("r_out", self.r_out)
        if not self.r_in < self.r_out:
            raise DegenerateRegionError(
                f"annulus needs r_in < r_out, got {self.r_in} >= {self.r_out}")

    def measure(self, d: int) -> float:
        self.validate(d)
        return ball_volume(d, self.r_out) - ball_volume(d, self.r_in)

    def bounding_box(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        return np.full(d, -self.r_out), np.full(d, self.r_out)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts * pts, axis=-1)
        return (r2 >= self.r_in ** 2) & (r2 <= self.r_out ** 2)

    def to_json(self) -> dict:
        return {"shape": "annulus", "r_in": self.r_in, "r_out": self.r_out}


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given as one ``(low, high)`` pair per component."""

    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))

    @classmethod
    def cube(cls, d: int, low: float, high: float) -> Box:
        return cls(((low, high),) * d)

    def validate(self, d: int) -> None:
        if len(self.bounds) != d:
            raise DegenerateRegionError(
                f"box has {len(self.bounds)} component bounds, field needs {d}")
        for lo, hi in self.bounds:
            _finite_positive("box side", hi - lo)

    def measure(self, d: int) -> float:
        self.validate(d)
        return float(np.prod([hi - lo for lo, hi in self.bounds]))

    def bounding_box(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        b = np.array(self.bounds)
        return b[:, 0].copy(), b[:, 1].copy()

    def corners(self) -> np.ndarray:
        b = np.array(self.bounds)
        d = len(b)
        idx = (np.arange(2 ** d)[:, None] >> np.arange(d)) & 1
        return b[np.arange(d), idx]

    def contains(self, pts: np.ndarray) -> np.ndarray:
        b = np.array(self.bounds)
        return np.all((pts >= b[:, 0]) & (pts <= b[:, 1]), axis=-1)

    def to_json(self) -> dict:
        return {"shape": "box", "bounds": [list(p) for p in self.bounds]}


Region = Union[Ball, Annulus, Box]


def region_from_json(obj: dict) -> Region:
    shape = obj.get("shape")
    if shape == "ball":
        return Ball(float(obj.get("radius", 1.0)))
    if shape == "annulus":
        return Annulus(float(obj.get("r_in", 1.0)), float(obj.get("r_out", 2.0)))
    if shape == "box":
        return Box(tuple(tuple(p) for p in obj["bounds"]))
    raise ValueError(f"unknown region shape {shape!r}")


def default_box(d: int) -> Box:
    """Off-centre box used as the third region shape in cross-checks."""
    return Box(tuple((0.25, 1.5) if k == 0 else (-0.5, 1.0) for k in range(d)))


def region_image_bounds(region: Region, A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact axis-aligned bounding box of ``{A c : c in region}``."""
    A = np.asarray(A, dtype=float)
    if isinstance(region, Box):
        img = region.corners() @ A.T
        return img.min(axis=0), img.max(axis=0)
    r = region.radius if isinstance(region, Ball) else region.r_out
    half = r * np.linalg.norm(A, axis=1)
    return -half, half


def as_region(obj: Region | dict) -> Region:
    if isinstance(obj, (Ball, Annulus, Box)):
        return obj
    if isinstance(obj, dict):
        return region_from_json(obj)
    raise TypeError(f"cannot interpret {obj!r} as a region")
