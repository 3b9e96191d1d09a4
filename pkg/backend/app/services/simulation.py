"""
Monte Carlo execution of a delegation plan.

Each trial walks the plan in order and every step succeeds independently with
its effective rate; the first failed step ends the trial. All trials share one
Philox stream keyed by ``seed``. Trial ``i`` owns a fixed block of counter
steps, so a batch of trials is drawn in one call, any trial can be replayed on
its own, and the thread count never changes the result.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.config import get_settings
from ..models.plan import DelegationPlan, FailureEntry, SimulationResult

_MAX_KEY = 1 << 128
# Philox emits four 64-bit words per counter step.
_WORDS_PER_STEP = 4
# Trials drawn per vectorized call; bounds memory for large runs.
_BATCH = 65_536


def _stride(steps: int) -> int:
    """Uniforms reserved per trial: the step count rounded up to whole counter steps."""
    return -(-steps // _WORDS_PER_STEP) * _WORDS_PER_STEP


def _generator(seed: int, first_trial: int, steps: int) -> np.random.Generator:
    counter = first_trial * _stride(steps) // _WORDS_PER_STEP
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


def _check_seed(seed: int) -> None:
    if not 0 <= seed < _MAX_KEY:
        raise ValueError(f"seed must be in [0, 2**128), got {seed}")


def trial_outcome(plan: DelegationPlan, seed: int, trial: int) -> Optional[int]:
    """Position of the step that failed in ``trial``, or None if every step succeeded."""
    _check_seed(seed)
    rates = np.asarray(plan.rates, dtype=float)
    if rates.size == 0:
        return None
    draws = _generator(seed, trial, rates.size).random(rates.size)
    failed = np.flatnonzero(draws >= rates)
    return int(failed[0]) if failed.size else None


def _run(plan: DelegationPlan, seed: int, trials: range) -> Tuple[int, np.ndarray]:
    """Successes and per-position failure counts for a contiguous range of trials."""
    rates = np.asarray(plan.rates, dtype=float)
    n = rates.size
    failures = np.zeros(n, dtype=np.int64)
    if n == 0:
        return len(trials), failures

    stride = _stride(n)
    successes = 0
    for start in range(trials.start, trials.stop, _BATCH):
        count = min(_BATCH, trials.stop - start)
        draws = _generator(seed, start, n).random((count, stride))[:, :n]
        failed = draws >= rates
        aborted = failed.any(axis=1)
        successes += int(count - aborted.sum())
        failures += np.bincount(failed[aborted].argmax(axis=1), minlength=n)
    return successes, failures


def _chunks(trials: int, workers: int) -> List[range]:
    size = -(-trials // workers)
    return [range(start, min(start + size, trials)) for start in range(0, trials, size)]


def simulate(
    plan: DelegationPlan,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> SimulationResult:
    settings = get_settings()
    trials = settings.trials if trials is None else trials
    seed = settings.seed if seed is None else seed
    workers = settings.workers if workers is None else workers
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    _check_seed(seed)

    if workers == 1 or trials < workers:
        successes, per_position = _run(plan, seed, range(trials))
    else:
        successes, per_position = 0, np.zeros(len(plan.rates), dtype=np.int64)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part_successes, part_failures in pool.map(lambda chunk: _run(plan, seed, chunk), _chunks(trials, workers)):
                successes += part_successes
                per_position += part_failures

    failures = {u.id: int(per_position[i]) for i, u in enumerate(plan.tree.units)}
    result = SimulationResult(
        trials=trials,
        successes=successes,
        empirical_rate=successes / trials,
        per_unit_failure_counts=failures,
        unit_motions={u.id: u.motion.label for u in plan.tree.units},
        seed=seed,
        analytic_rate=plan.total_success,
    )
    logger.info(
        f"Simulated {trials} trial(s) of {plan.tree.goal} at M={plan.m}: "
        f"empirical {result.empirical_rate:.4f} vs analytic {result.analytic_rate:.4f}"
    )
    if not result.within_sigma():
        logger.warning(f"Empirical rate is more than 3 standard errors from {result.analytic_rate:.6g}")
    return result


def failure_report(result: SimulationResult) -> List[FailureEntry]:
    """Units that failed at least once, most failures first, ties by unit id."""
    failed = result.trials - result.successes
    ranked = sorted(
        ((uid, n) for uid, n in result.per_unit_failure_counts.items() if n > 0),
        key=lambda item: (-item[1], item[0]),
    )
    return [
        FailureEntry(
            unit_id=uid,
            motion=result.unit_motions.get(uid, ""),
            failures=n,
            share=n / failed,
        )
        for uid, n in ranked
    ]
