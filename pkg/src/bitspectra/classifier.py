"""Group classification from the self-correlation metrics.

The decision surface lives in (M, df, alpha) space, where
alpha = log(max(mf, 1)) / log(M) is the size-normalized exponent of mf.
Structured data holds df near c*M, compressed and random data near
df ~ 1; within the low-df region, residual bit bias left by entropy
coders keeps alpha of compressed data visibly above the alpha ~ 1 of
true random input. df is the primary discriminant; alpha is secondary
because single-file mf for random input is heavy-tailed around mean M.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import CalibrationError
from .metrics import MetricsRecord


class GroupLabel(str, Enum):
    STRUCTURED = "structured"
    COMPRESSED = "compressed"
    RANDOM = "random"
    INDETERMINATE = "indeterminate"

    def __str__(self) -> str:  # CSV and manifest cells carry the bare value
        return self.value


@dataclass(frozen=True)
class FeatureVector:
    m_bits: int
    alpha: float
    df: float
    df_norm: float  # df / (M/100)


@dataclass(frozen=True)
class Thresholds:
    """Decision boundaries. df_split(M) = df_split_c * M**df_split_gamma.

    The margins scale the confidence score: distance to a boundary is
    measured in units of the margin, and a sub-margin, sub-0.5-confidence
    result on a small file is reported as indeterminate rather than
    forced into a group.
    """

    min_confident_bits: int = 10_000_000
    df_split_c: float = 0.1
    df_split_gamma: float = 0.5
    alpha_split: float = 1.25
    df_margin_decades: float = 0.5
    alpha_margin: float = 0.125
    calibration_warning: bool = False

    def __post_init__(self):
        if self.min_confident_bits < 1 or self.df_split_c <= 0:
            raise ValueError("thresholds require min_confident_bits >= 1 and df_split_c > 0")
        if self.df_margin_decades <= 0 or self.alpha_margin <= 0:
            raise ValueError("margins must be positive")

    def df_split(self, m_bits: int) -> float:
        return self.df_split_c * float(m_bits) ** self.df_split_gamma

    def to_json(self) -> str:
        return json.dumps(
            {
                "min_confident_bits": self.min_confident_bits,
                "df_split_c": self.df_split_c,
                "df_split_gamma": self.df_split_gamma,
                "alpha_split": self.alpha_split,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Thresholds":
        doc = json.loads(text)
        return cls(
            min_confident_bits=int(doc["min_confident_bits"]),
            df_split_c=float(doc["df_split_c"]),
            df_split_gamma=float(doc["df_split_gamma"]),
            alpha_split=float(doc["alpha_split"]),
        )

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Thresholds":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def features(r: MetricsRecord) -> FeatureVector:
    """Re-express a record on the classification axes."""
    m = r.length_bits
    if m < 2:
        raise ValueError(f"classification needs M >= 2, got {m}")
    alpha = math.log(max(r.mf, 1)) / math.log(m)
    return FeatureVector(m_bits=m, alpha=alpha, df=r.df, df_norm=100.0 * r.df / m)


_DF_FLOOR = 1e-12  # keeps log distances finite when df == 0


def classify(r: MetricsRecord, t: Thresholds | None = None) -> tuple[GroupLabel, float]:
    """Label one record and score the decision in [0, 1].

    Rule: df above the split curve is structured; otherwise alpha below
    alpha_split is random, else compressed. Confidence combines file
    size with distance from the nearest decision boundary; a small file
    (M < min_confident_bits) inside the boundary margin with confidence
    below 0.5 is reported indeterminate.
    """
    t = t or Thresholds()
    f = features(r)
    split = t.df_split(f.m_bits)
    dist_df = abs(math.log10(max(f.df, _DF_FLOOR)) - math.log10(split)) / t.df_margin_decades

    if f.df > split:
        label = GroupLabel.STRUCTURED
        boundary_dist = dist_df
    else:
        dist_alpha = abs(f.alpha - t.alpha_split) / t.alpha_margin
        boundary_dist = min(dist_df, dist_alpha)
        label = GroupLabel.RANDOM if f.alpha < t.alpha_split else GroupLabel.COMPRESSED

    size_conf = min(1.0, math.log2(f.m_bits) / math.log2(t.min_confident_bits))
    confidence = size_conf * min(1.0, boundary_dist)
    if (
        confidence < 0.5
        and f.m_bits < t.min_confident_bits
        and boundary_dist < 1.0
    ):
        return GroupLabel.INDETERMINATE, confidence
    return label, confidence


def _fit_loglog_medians(
    m_values: np.ndarray, df_values: np.ndarray
) -> tuple[float, float] | None:
    """Least-squares line through per-octave medians of (log10 M, log10 df).

    Returns (intercept, slope) or None when fewer than two octave bins
    exist (no usable trend).
    """
    logm = np.log10(m_values.astype(np.float64))
    logdf = np.log10(np.maximum(df_values.astype(np.float64), _DF_FLOOR))
    bins = np.round(np.log2(m_values.astype(np.float64))).astype(np.int64)
    xs, ys = [], []
    for key in np.unique(bins):
        sel = bins == key
        xs.append(float(np.median(logm[sel])))
        ys.append(float(np.median(logdf[sel])))
    if len(xs) < 2:
        return None
    coeffs = np.polyfit(np.asarray(xs), np.asarray(ys), 1)
    return float(coeffs[1]), float(coeffs[0])  # intercept, slope


def calibrate(
    labeled: Sequence[tuple[MetricsRecord, GroupLabel]],
    base: Thresholds | None = None,
) -> Thresholds:
    """Fit thresholds from labeled records.

    df_split becomes the per-M geometric midpoint of the structured and
    non-structured df trends, each fit as c*M^gamma through per-octave
    medians in log-log space. alpha_split becomes the midpoint of the
    random and compressed alpha means. Degenerate fits fall back to the
    base thresholds with calibration_warning set.
    """
    base = base or Thresholds()
    by_group: dict[GroupLabel, list[tuple[int, float, float]]] = {
        GroupLabel.STRUCTURED: [],
        GroupLabel.COMPRESSED: [],
        GroupLabel.RANDOM: [],
    }
    for record, label in labeled:
        if label not in by_group:
            raise CalibrationError(f"cannot calibrate on label {label}")
        f = features(record)
        by_group[label].append((f.m_bits, f.df, f.alpha))

    for group, rows in by_group.items():
        if len(rows) < 10:
            raise CalibrationError(
                f"need >= 10 records per group, {group.value} has {len(rows)}"
            )
        sizes = [m for m, _, _ in rows]
        if max(sizes) < 100 * min(sizes):
            raise CalibrationError(
                f"{group.value} records span less than 2 decades of M "
                f"({min(sizes)}..{max(sizes)})"
            )

    structured = np.asarray(by_group[GroupLabel.STRUCTURED], dtype=np.float64)
    rest = np.asarray(
        by_group[GroupLabel.COMPRESSED] + by_group[GroupLabel.RANDOM], dtype=np.float64
    )
    fit_s = _fit_loglog_medians(structured[:, 0], structured[:, 1])
    fit_r = _fit_loglog_medians(rest[:, 0], rest[:, 1])

    warn = False
    df_split_c, df_split_gamma = base.df_split_c, base.df_split_gamma
    if fit_s is None or fit_r is None:
        warn = True
    else:
        intercept = 0.5 * (fit_s[0] + fit_r[0])
        gamma = 0.5 * (fit_s[1] + fit_r[1])
        c = 10.0**intercept
        # Boundary sanity: strictly between the df ~ 1 and df ~ M/100 regimes.
        anchor = c * 1e4**gamma
        if not (0.0 < gamma < 1.0 and 1.0 < anchor < 100.0):
            warn = True
        else:
            df_split_c, df_split_gamma = c, gamma

    alpha_random = float(np.mean([a for _, _, a in by_group[GroupLabel.RANDOM]]))
    alpha_compressed = float(np.mean([a for _, _, a in by_group[GroupLabel.COMPRESSED]]))
    alpha_split = 0.5 * (alpha_random + alpha_compressed)
    if not 1.0 < alpha_split < 1.5:
        alpha_split = base.alpha_split
        warn = True

    return replace(
        base,
        df_split_c=df_split_c,
        df_split_gamma=df_split_gamma,
        alpha_split=alpha_split,
        calibration_warning=warn,
    )
