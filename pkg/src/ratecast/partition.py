"""Segmentation of a rate series into distribution-homogeneous sub-samples.

``forward_partition`` grows contiguous groups from the front of the series:
a group starts with the minimum of four observations, is extended one
observation at a time while the goodness-of-fit test keeps passing, and is
closed at the last passing length.  A trailing remainder shorter than four
observations becomes the leftover.  ``backward_window`` runs the mirrored
procedure from the latest observation to find the change point for rolling
forecasts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ratecast.distributions import fit_johnson, johnson_forward
from ratecast.errors import FitError, GofTestError
from ratecast.goftests import GofResult, ks_ncx2_test, lilliefors_test

MIN_GROUP = 4

KINDS = ("normal", "ncx2")


@dataclass(frozen=True)
class Partition:
    """Ordered contiguous groups covering a series, plus a short leftover tail.

    ``values`` holds the working copy of the series the partition was built
    on, with Johnson-normalized values written back for groups where the
    transform was applied; it is excluded from serialization.
    """

    kind: str
    groups: tuple[tuple[int, int], ...]
    leftover: tuple[int, int] | None
    johnson_applied: tuple[bool, ...]
    forced: tuple[bool, ...]
    values: np.ndarray = field(repr=False, compare=False)

    @property
    def group_count(self) -> int:
        return len(self.groups)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "groups": [list(g) for g in self.groups],
            "leftover": list(self.leftover) if self.leftover else None,
            "johnson_applied": list(self.johnson_applied),
            "forced": list(self.forced),
        }


@dataclass(frozen=True)
class WindowSelection:
    """Latest homogeneous window of a series, ending at its final index."""

    change_point: int
    window: tuple[int, int]
    kind: str
    forced: bool


def _series_values(series) -> np.ndarray:
    rates = getattr(series, "rates", series)
    return np.asarray(rates, dtype=np.float64)


def _run_test(values: np.ndarray, kind: str, level: float) -> GofResult | None:
    """Run the kind's test; a degenerate (near-constant) window counts as passing."""
    test = lilliefors_test if kind == "normal" else ks_ncx2_test
    try:
        return test(values, level)
    except (GofTestError, FitError):
        return None


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


def _try_johnson(group: np.ndarray, level: float) -> np.ndarray | None:
    """Normalize a near-boundary group; returns the destandardized values.

    The fitted transform maps the group onto the standard normal scale and
    the result is mapped back to the group's own mean/sd.  Returns None
    (caller keeps the raw values) when the fit fails, the group leaves the
    transform's domain, or the transformed group would itself reject.
    """
    try:
        fit = fit_johnson(group)
        z = johnson_forward(fit, group)
    except (FitError, ValueError):
        return None
    transformed = group.mean() + group.std(ddof=1) * z
    if not np.all(np.isfinite(transformed)):
        return None
    try:
        recheck = lilliefors_test(transformed, level)
    except GofTestError:
        return None
    return transformed if not recheck.reject else None


def forward_partition(series, kind: str, level: float = 0.05) -> Partition:
    """Partition a series into maximal contiguous test-passing groups.

    For the normal kind, a closed group whose p-value sits in the
    near-boundary band above the level is Johnson-normalized in place and
    flagged.  A group whose minimal four observations already reject is
    still emitted, flagged as forced.
    """
    _check_kind(kind)
    x = _series_values(series).copy()
    n = x.size
    if n < MIN_GROUP:
        raise ValueError(f"series must have at least {MIN_GROUP} observations, got {n}")

    groups: list[tuple[int, int]] = []
    johnson: list[bool] = []
    forced: list[bool] = []
    start = 0
    while n - start >= MIN_GROUP:
        end = start + MIN_GROUP - 1
        result = _run_test(x[start : end + 1], kind, level)
        if result is not None and result.reject:
            group_forced = True
        else:
            group_forced = False
            while end + 1 < n:
                candidate = _run_test(x[start : end + 2], kind, level)
                if candidate is not None and candidate.reject:
                    break
                end += 1
                result = candidate
        applied = False
        if (
            kind == "normal"
            and not group_forced
            and result is not None
            and result.near_boundary
        ):
            transformed = _try_johnson(x[start : end + 1], level)
            if transformed is not None:
                x[start : end + 1] = transformed
                applied = True
        groups.append((start, end))
        johnson.append(applied)
        forced.append(group_forced)
        start = end + 1

    leftover = (start, n - 1) if start <= n - 1 else None
    return Partition(kind, tuple(groups), leftover, tuple(johnson), tuple(forced), x)


def backward_window(series, kind: str, level: float = 0.05) -> WindowSelection:
    """Largest test-passing window ending at the series' final observation.

    Grows backward one observation at a time and stops at the first
    rejection; when even the minimal window rejects, that window is
    returned flagged as forced.
    """
    _check_kind(kind)
    x = _series_values(series)
    n = x.size
    if n < MIN_GROUP:
        raise ValueError(f"series must have at least {MIN_GROUP} observations, got {n}")

    start = n - MIN_GROUP
    result = _run_test(x[start:], kind, level)
    if result is not None and result.reject:
        return WindowSelection(start, (start, n - 1), kind, forced=True)
    while start > 0:
        candidate = _run_test(x[start - 1 :], kind, level)
        if candidate is not None and candidate.reject:
            break
        start -= 1
    return WindowSelection(start, (start, n - 1), kind, forced=False)


def coverage_indices(partition: Partition) -> np.ndarray:
    """All indices covered by groups plus leftover, in order (for invariants)."""
    parts: list[Sequence[int]] = [range(a, b + 1) for a, b in partition.groups]
    if partition.leftover is not None:
        parts.append(range(partition.leftover[0], partition.leftover[1] + 1))
    return np.concatenate([np.asarray(p, dtype=np.int64) for p in parts])
