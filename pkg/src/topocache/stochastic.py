"""Monte Carlo delivery time under Poisson-distributed cache occupancies."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError
from .model import format_rational, parse_rational
from .mismatch import _numerator
from .symfunc import elem_sym

__all__ = [
    "PoissonSpec",
    "BudgetRow",
    "SimulationSummary",
    "sample_occupancy",
    "expected_delay",
    "simulate",
    "emit_csv",
    "write_csv",
    "CSV_HEADER",
    "parse_means",
]

CSV_HEADER = ("t", "mean_T_mismatch", "stderr", "T_perfect_assumed", "mean_T_perfect", "excluded_samples")


@dataclass(frozen=True)
class PoissonSpec:
    """Mean occupancies, sample count, 64-bit seed and the budgets to evaluate."""

    means: tuple[Fraction, ...]
    num_samples: int
    seed: int
    budgets: tuple[int, ...] = ()

    def __post_init__(self):
        means = tuple(parse_rational(m) for m in self.means)
        if not means or any(m <= 0 for m in means):
            raise InvalidArgumentError(f"Poisson means must be positive, got {[str(m) for m in means]}")
        if not isinstance(self.num_samples, int) or self.num_samples < 1:
            raise InvalidArgumentError(f"need at least one sample, got {self.num_samples!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        budgets = tuple(self.budgets) or tuple(range(len(means) + 1))
        for t in budgets:
            if isinstance(t, bool) or not isinstance(t, int) or not 0 <= t <= len(means):
                raise InvalidArgumentError(f"budgets must be integers in [0, {len(means)}], got {t!r}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "budgets", budgets)

    @property
    def Lambda(self) -> int:
        return len(self.means)


def _draw(seed: int, cache: int, index: int, mean: float) -> int:
    # one counter block per (cache, sample): draws are independent of evaluation order
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, cache, index]))
    return int(gen.poisson(mean))


def sample_occupancy(spec: PoissonSpec, index: int) -> tuple[int, ...]:
    """Occupancy vector of sample ``index``, reproducible from ``(seed, index)``."""
    if not 0 <= index < spec.num_samples:
        raise InvalidArgumentError(f"sample index must lie in [0, {spec.num_samples}), got {index}")
    return tuple(_draw(spec.seed, lam, index, float(m)) for lam, m in enumerate(spec.means))


@dataclass(frozen=True)
class BudgetRow:
    t: int
    mean_T_mismatch: Fraction
    stderr: float
    T_perfect_assumed: Fraction
    mean_T_perfect: float | None
    excluded_samples: int
    num_samples: int


@dataclass(frozen=True)
class SimulationSummary:
    spec: PoissonSpec
    rows: tuple[BudgetRow, ...]

    def row(self, t: int) -> BudgetRow:
        for r in self.rows:
            if r.t == t:
                return r
        raise KeyError(t)


def _stderr(numerators: Sequence, denom, n: int) -> float:
    if n < 2:
        return 0.0
    total = sum(numerators)
    # exact sample variance of x_i = a_i / denom
    var = Fraction(n * sum(a * a for a in numerators) - total * total) / (denom * denom * n * (n - 1))
    return math.sqrt(var / n)


def _plain(means: Sequence[Fraction]) -> tuple:
    return tuple(m.numerator if m.denominator == 1 else m for m in means)


def _row(spec: PoissonSpec, t: int, samples: Sequence[tuple[int, ...]]) -> BudgetRow:
    means = _plain(spec.means)
    denom = elem_sym(means, t)
    # every sample shares the denominator e_t(means); sum numerators only
    nums = [_numerator(means, L, t) for L in samples]
    n = len(samples)
    perfect = [Fraction(elem_sym(L, t + 1), elem_sym(L, t)) for L in samples if min(L) >= 1]
    return BudgetRow(
        t=t,
        mean_T_mismatch=Fraction(sum(nums)) / (denom * n),
        stderr=_stderr(nums, denom, n),
        T_perfect_assumed=Fraction(elem_sym(means, t + 1)) / denom,
        mean_T_perfect=math.fsum(float(x) for x in perfect) / len(perfect) if perfect else None,
        excluded_samples=n - len(perfect),
        num_samples=n,
    )


def expected_delay(spec: PoissonSpec, t: int) -> BudgetRow:
    """Sample mean of the mismatched delivery time at budget ``t``.

    Placement is sized for the means.  The perfect-knowledge average skips
    samples with an empty cache and reports how many it skipped.
    """
    if isinstance(t, bool) or not isinstance(t, int) or not 0 <= t <= spec.Lambda:
        raise InvalidArgumentError(f"t must be an integer in [0, {spec.Lambda}], got {t!r}")
    samples = [sample_occupancy(spec, i) for i in range(spec.num_samples)]
    return _row(spec, t, samples)


def simulate(spec: PoissonSpec) -> SimulationSummary:
    """Evaluate every budget of ``spec`` on one shared set of samples."""
    samples = [sample_occupancy(spec, i) for i in range(spec.num_samples)]
    return SimulationSummary(spec, tuple(_row(spec, t, samples) for t in spec.budgets))


def _decimal(x) -> str:
    return "" if x is None else format(float(x), ".12g")


def write_csv(summary: SimulationSummary, fh) -> None:
    """Write the decimal table to an open text stream."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in summary.rows:
        writer.writerow([
            r.t,
            _decimal(r.mean_T_mismatch),
            _decimal(r.stderr),
            _decimal(r.T_perfect_assumed),
            _decimal(r.mean_T_perfect),
            r.excluded_samples,
        ])


def emit_csv(summary: SimulationSummary, path: str | Path) -> tuple[Path, Path]:
    """Write the decimal CSV and a sibling ``.json`` with exact ``"p/q"`` values."""
    path = Path(path)
    json_path = path.with_suffix(".json")
    exact = {
        "means": [format_rational(m) for m in summary.spec.means],
        "num_samples": summary.spec.num_samples,
        "seed": summary.spec.seed,
        "rows": [
            {
                "t": r.t,
                "mean_T_mismatch": format_rational(r.mean_T_mismatch),
                "stderr": r.stderr,
                "T_perfect_assumed": format_rational(r.T_perfect_assumed),
                "mean_T_perfect": r.mean_T_perfect,
                "excluded_samples": r.excluded_samples,
            }
            for r in summary.rows
        ],
    }
    try:
        with path.open("w", newline="") as fh:
            write_csv(summary, fh)
        json_path.write_text(json.dumps(exact, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write simulation output to {path}: {exc.strerror or exc}") from exc
    return path, json_path


def parse_means(text: str) -> tuple[Fraction, ...]:
    """``"20,20,8"`` -> exact means."""
    return tuple(parse_rational(x) for x in text.split(",") if x.strip())

