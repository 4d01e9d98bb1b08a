"""Grid sweep for the ground-truth blend weights.

Two one-dimensional sweeps, scored by mean CC + mean SIM against reference
labels: first the fixation weight alpha with the beta:gamma ratio fixed, then
the beta fraction with alpha fixed. Ties break toward smaller alpha, then
larger beta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OutOfRangeError, ZeroVarianceError
from .grid import SaliencyGrid
from .groundtruth import AnnotatedImage, GtWeights, generate_psal
from .metrics import cc, sim
from .preference import PreferenceVector

DEFAULT_ALPHA_GRID = (0.01, 0.02, 0.04, 0.06, 0.08, 0.10, 0.14, 0.20)
DEFAULT_RATIO_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class SweepSpec:
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    ratio_grid: tuple[float, ...] = DEFAULT_RATIO_GRID  # beta fractions of (1 - alpha)
    fixed_ratio: float = 0.8
    fixed_alpha: float = 0.06

    def __post_init__(self):
        if not self.alpha_grid or not self.ratio_grid:
            raise ValueError("sweep grids must be non-empty")
        if min(self.alpha_grid) < 0 or min(self.ratio_grid) < 0:
            raise ValueError("sweep grid values must be nonnegative")


@dataclass(frozen=True)
class Candidate:
    weights: GtWeights
    mean_cc: float
    mean_sim: float
    objective: float
    failed: bool = False
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    candidates: tuple[Candidate, ...]
    best: GtWeights


def final_weights(alpha: float, beta_fraction: float) -> GtWeights:
    """Split the non-alpha mass by the beta fraction: beta = (1-a)*f, gamma = rest.

    Computed in exact rational arithmetic on the decimal reading of the inputs
    with a single rounding at the end, so decimal-clean inputs give
    decimal-clean weights (0.06, 0.8 -> 0.06, 0.752, 0.188 exactly).
    """
    if not 0.0 <= alpha <= 1.0:
        raise OutOfRangeError(f"alpha {alpha} outside [0, 1]")
    if not 0.0 <= beta_fraction <= 1.0:
        raise OutOfRangeError(f"beta_fraction {beta_fraction} outside [0, 1]")
    a = Fraction(str(alpha))
    f = Fraction(str(beta_fraction))
    beta = (1 - a) * f
    gamma = (1 - a) * (1 - f)
    return GtWeights(float(a), float(beta), float(gamma))


def _score_candidate(
    dataset: list[AnnotatedImage],
    labels: list[SaliencyGrid],
    pvec: PreferenceVector,
    weights: GtWeights,
) -> Candidate:
    try:
        cc_vals = []
        sim_vals = []
        for img, label in zip(dataset, labels):
            generated = generate_psal(img, pvec, weights, label.height, label.width)
            try:
                c = cc(generated, label)
            except ZeroVarianceError:
                continue  # excluded pairwise from both terms
            cc_vals.append(c)
            sim_vals.append(sim(generated, label))
        if not cc_vals:
            raise ZeroVarianceError("no image produced a defined CC score")
        mean_cc = float(np.mean(cc_vals))
        mean_sim = float(np.mean(sim_vals))
        return Candidate(weights, mean_cc, mean_sim, mean_cc + mean_sim)
    except Exception as exc:  # noqa: BLE001 - a failed candidate must not kill the sweep
        return Candidate(weights, float("nan"), float("nan"), float("-inf"),
                         failed=True, error=f"{type(exc).__name__}: {exc}")


def _pick_best(candidates: list[Candidate]) -> GtWeights:
    # ties: smaller alpha wins, then larger beta
    best = max(candidates, key=lambda c: (c.objective, -c.weights.alpha, c.weights.beta))
    if best.failed:
        raise RuntimeError("every sweep candidate failed")
    return best.weights


def sweep_alpha(
    dataset: list[AnnotatedImage],
    labels: list[SaliencyGrid],
    pvec: PreferenceVector,
    spec: SweepSpec,
) -> SweepResult:
    """Vary alpha over the grid with the beta:gamma split fixed."""
    candidates = [
        _score_candidate(dataset, labels, pvec, final_weights(a, spec.fixed_ratio))
        for a in spec.alpha_grid
    ]
    return SweepResult(tuple(candidates), _pick_best(candidates))


def sweep_ratio(
    dataset: list[AnnotatedImage],
    labels: list[SaliencyGrid],
    pvec: PreferenceVector,
    spec: SweepSpec,
) -> SweepResult:
    """Vary the beta fraction over the grid with alpha fixed."""
    candidates = [
        _score_candidate(dataset, labels, pvec, final_weights(spec.fixed_alpha, f))
        for f in spec.ratio_grid
    ]
    return SweepResult(tuple(candidates), _pick_best(candidates))
