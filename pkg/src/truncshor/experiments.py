"""Truncation sweeps and tries-until-factor ensembles.

A "try" is one sampled measurement of the control register followed by the
full continued-fractions analysis; barren draws (l = 0 and friends) count
as failed tries. All randomness flows from explicit seeds through a fixed
avalanche mixer, so every result is reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np

from .circuit import LeveledCircuit
from .modmath import FactoringInstance, Orbit, analyze_measurement, build_orbit
from .shor import PhaseDistribution, exact_distribution, nearest_phase_bin
from .synth import synth_all_powers

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    # SplitMix64 finalizer.
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, *parts: int) -> int:
    """Mix (base_seed, *parts) into one 64-bit seed.

    Sequential SplitMix64 absorption; the exact function is a compatibility
    contract, since per-iteration seeds (and therefore all sweep results)
    depend on it.
    """
    x = base_seed & _MASK64
    for part in parts:
        x = _mix64(x ^ ((part & _MASK64) + _GAMMA))
    return x


@lru_cache(maxsize=None)
def _produces_factors(N: int, a: int, m: int, l: int) -> bool:
    instance = FactoringInstance(N=N, a=a, m=m)
    return analyze_measurement(instance, l).factors is not None


@dataclass(frozen=True)
class TryOutcome:
    """Result of one tries-until-factor run."""

    tries: int
    capped: bool
    l: Optional[int] = None
    factors: Optional[tuple[int, int]] = None


def tries_until_factor(
    instance: FactoringInstance,
    circuits: Sequence[LeveledCircuit],
    seed: int,
    max_tries: int = 500,
    dist: Optional[PhaseDistribution] = None,
) -> TryOutcome:
    """Draw measurements until one yields factors; report the 1-based count.

    Draws come from the exact distribution of the given circuits (pass
    ``dist`` to reuse a precomputed one; they are drawn in a single batched
    call, which fixes the stream for a given seed). Returns max_tries with
    capped=True when no draw succeeds.
    """
    if max_tries < 1:
        raise ValueError(f"max_tries must be >= 1, got {max_tries}")
    if dist is None:
        dist = exact_distribution(instance, circuits)
    rng = np.random.default_rng(seed)
    draws = rng.choice(dist.M, size=max_tries, p=dist.probabilities / dist.probabilities.sum())
    for i, l in enumerate(draws, start=1):
        l = int(l)
        if _produces_factors(instance.N, instance.a, instance.m, l):
            report = analyze_measurement(instance, l)
            return TryOutcome(tries=i, capped=False, l=l, factors=report.factors)
    return TryOutcome(tries=max_tries, capped=True)


@dataclass(frozen=True)
class TriesResult:
    """Ensemble of tries-until-factor counts for one truncation level."""

    instance: FactoringInstance
    trnc_lv: int
    num_it: int
    tries: tuple[int, ...]
    capped: tuple[bool, ...]

    @property
    def mean(self) -> float:
        return sum(self.tries) / len(self.tries)

    @property
    def capped_fraction(self) -> float:
        return sum(self.capped) / len(self.capped)


def _run_level(
    instance: FactoringInstance,
    orbit: Orbit,
    trnc_lv: int,
    num_it: int,
    base_seed: int,
    max_tries: int,
) -> tuple[TriesResult, PhaseDistribution]:
    circuits = synth_all_powers(orbit, instance.m, trnc_lv)
    dist = exact_distribution(instance, circuits)
    tries: list[int] = []
    capped: list[bool] = []
    for it in range(num_it):
        outcome = tries_until_factor(
            instance,
            circuits,
            seed=derive_seed(base_seed, trnc_lv, it),
            max_tries=max_tries,
            dist=dist,
        )
        tries.append(outcome.tries)
        capped.append(outcome.capped)
    result = TriesResult(
        instance=instance,
        trnc_lv=trnc_lv,
        num_it=num_it,
        tries=tuple(tries),
        capped=tuple(capped),
    )
    return result, dist


def truncation_sweep(
    instance: FactoringInstance,
    trnc_range: Iterable[int],
    num_it: int,
    base_seed: int,
    max_tries: int = 500,
) -> list[TriesResult]:
    """Ensemble means across truncation levels.

    Circuits and the exact distribution are synthesized once per level;
    iteration i at level t uses seed derive_seed(base_seed, t, i).
    """
    if num_it < 1:
        raise ValueError(f"num_it must be >= 1, got {num_it}")
    orbit = build_orbit(instance)
    out = []
    for trnc_lv in trnc_range:
        result, _ = _run_level(instance, orbit, trnc_lv, num_it, base_seed, max_tries)
        out.append(result)
    return out


def peak_presence(
    instance: FactoringInstance, orbit: Orbit, dist: PhaseDistribution
) -> dict[int, bool]:
    """Which factor-producing eigenphases carry above-uniform mass.

    For each s coprime to r, the neighborhood is the bins within +-1 of
    round(M*s/r); the peak counts as present when the summed probability of
    the neighborhood bins whose analysis actually yields factors exceeds
    twice the uniform floor 1/M.
    """
    r = orbit.r
    M = instance.M
    out: dict[int, bool] = {}
    for s in range(1, r):
        if gcd(s, r) != 1:
            continue
        center = nearest_phase_bin(s, r, M)
        mass = 0.0
        for l in (center - 1, center, center + 1):
            l %= M
            if _produces_factors(instance.N, instance.a, instance.m, l):
                mass += float(dist.probabilities[l])
        out[s] = mass > 2.0 / M
    return out


@dataclass(frozen=True)
class ResolutionCell:
    """One (m, trnc_lv) cell of a resolution study."""

    result: TriesResult
    peaks: dict[int, bool]


def resolution_study(
    instance: FactoringInstance,
    m_values: Iterable[int],
    trnc_range: Iterable[int],
    num_it: int,
    base_seed: int,
    max_tries: int = 500,
) -> dict[tuple[int, int], ResolutionCell]:
    """Truncation sweep at several control widths, with peak-presence tables."""
    trnc_levels = list(trnc_range)
    out: dict[tuple[int, int], ResolutionCell] = {}
    for m in m_values:
        inst_m = replace(instance, m=m)
        orbit = build_orbit(inst_m)
        for trnc_lv in trnc_levels:
            result, dist = _run_level(inst_m, orbit, trnc_lv, num_it, base_seed, max_tries)
            out[(m, trnc_lv)] = ResolutionCell(
                result=result, peaks=peak_presence(inst_m, orbit, dist)
            )
    return out


def study_csv(results: Sequence[TriesResult]) -> str:
    """CSV rows keyed by (m, trnc_lv): N,a,r,n,m,trnc_lv,num_it,mean_tries,capped_fraction."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["N", "a", "r", "n", "m", "trnc_lv", "num_it", "mean_tries", "capped_fraction"]
    )
    for res in results:
        inst = res.instance
        writer.writerow(
            [
                inst.N,
                inst.a,
                build_orbit(inst).r,
                inst.n,
                inst.m,
                res.trnc_lv,
                res.num_it,
                repr(res.mean),
                repr(res.capped_fraction),
            ]
        )
    return buf.getvalue()


def study_json(results: Sequence[TriesResult]) -> str:
    """JSON mirror of study_csv including the per-iteration arrays."""
    rows = []
    for res in results:
        inst = res.instance
        rows.append(
            {
                "N": inst.N,
                "a": inst.a,
                "r": build_orbit(inst).r,
                "n": inst.n,
                "m": inst.m,
                "trnc_lv": res.trnc_lv,
                "num_it": res.num_it,
                "mean_tries": res.mean,
                "capped_fraction": res.capped_fraction,
                "tries": list(res.tries),
                "capped": list(res.capped),
            }
        )
    return json.dumps({"rows": rows}, indent=2)
