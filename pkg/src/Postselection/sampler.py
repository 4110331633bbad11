from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.BayesNet.lib import joint_distribution
from src.BayesNet.models import Scenario
from src.constants import MAX_SEED, SHOT_CHUNK
from src.errors import InvalidShots
from src.Postselection.models import (
    NO_ACCEPTED_SHOTS,
    UNCOVERED_EIGENSTATE,
    ConvergenceRow,
    ShotReport,
)

logger = logging.getLogger(__name__)

ChunkCounts = Tuple[np.ndarray, np.ndarray, np.ndarray]


def chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    """Stream for one fixed-size block of shots, independent of the worker count"""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    )


class ProtocolSampler:
    """
    Shot-level simulation of the measurement scheme on N+1 independent copies.

    Stage 1 measures every copy in the eigenbasis of rho; a shot survives only when
    all copies agree on s. Stage 2 measures copy n of a surviving shot in the local
    basis of time t_n.
    """

    def __init__(
        self,
        scenario: Scenario,
        seed: int,
        workers: Optional[int] = None,
        chunk: int = SHOT_CHUNK,
    ) -> None:
        if not 0 <= seed < MAX_SEED:
            raise InvalidShots(f"seed {seed} is not a 64-bit unsigned integer")
        self.scenario = scenario
        self.seed = seed
        self.workers = workers
        self.chunk = chunk
        self.dim = scenario.dim
        self.copies = scenario.copies
        populations = np.where(
            scenario.populations < scenario.tolerances.pop_cutoff,
            0.0,
            scenario.populations,
        )
        self.populations = populations / populations.sum()
        self.conditionals = [
            conditional / conditional.sum(axis=0, keepdims=True)
            for conditional in scenario.conditionals
        ]

    def _simulate_chunk(self, chunk_index: int, shots: int) -> ChunkCounts:
        rng = chunk_generator(self.seed, chunk_index)
        stage1 = rng.choice(self.dim, size=(shots, self.copies), p=self.populations)
        stage1_counts = np.bincount(stage1.ravel(), minlength=self.dim)

        agree = np.all(stage1 == stage1[:, :1], axis=1)
        accepted = np.bincount(stage1[agree, 0], minlength=self.dim)

        joint = np.zeros((self.dim, self.scenario.path_count), dtype=np.int64)
        for s in range(self.dim):
            if accepted[s] == 0:
                continue
            outcomes = np.stack(
                [
                    rng.choice(self.dim, size=accepted[s], p=conditional[:, s])
                    for conditional in self.conditionals
                ]
            )
            flat = np.ravel_multi_index(outcomes, self.scenario.path_shape)
            joint[s] = np.bincount(flat, minlength=self.scenario.path_count)
        return stage1_counts, accepted, joint

    def _chunks(self, shots: int) -> List[Tuple[int, int]]:
        full, rest = divmod(shots, self.chunk)
        sizes = [self.chunk] * full + ([rest] if rest else [])
        return list(enumerate(sizes))

    def run(self, shots: int) -> ShotReport:
        if shots < 1:
            raise InvalidShots(f"shots must be at least 1, got {shots}")
        chunks = self._chunks(shots)
        logger.info(f"Simulating {shots} shots in {len(chunks)} chunks")
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            results = list(pool.map(lambda c: self._simulate_chunk(*c), chunks))

        stage1 = sum(r[0] for r in results)
        accepted_by_s = sum(r[1] for r in results)
        joint = sum(r[2] for r in results)
        return self._report(shots, stage1, accepted_by_s, joint)

    def _report(
        self,
        shots: int,
        stage1: np.ndarray,
        accepted_by_s: np.ndarray,
        joint: np.ndarray,
    ) -> ShotReport:
        draws = shots * self.copies
        frequencies = stage1 / draws
        accepted = int(accepted_by_s.sum())
        flags = []

        covered = accepted_by_s > 0
        conditional = np.zeros(joint.shape, dtype=np.float64)
        conditional[covered] = joint[covered] / accepted_by_s[covered, None]
        uncovered = [s for s in range(self.dim) if frequencies[s] > 0 and not covered[s]]
        if accepted == 0:
            flags.append(NO_ACCEPTED_SHOTS)
            logger.warning("No shot survived postselection")
        elif uncovered:
            flags.append(f"{UNCOVERED_EIGENSTATE}:{uncovered}")
            logger.warning(f"Eigenstates {uncovered} have no accepted shots")

        estimates = frequencies @ conditional
        # binomial error of each stratum plus the multinomial error of the weights
        strata = conditional[covered]
        stratum_variance = (
            frequencies[covered, None] ** 2
            * strata
            * (1 - strata)
            / accepted_by_s[covered, None]
        ).sum(axis=0)
        weight_variance = np.clip(
            (frequencies @ conditional**2 - estimates**2) / draws, 0.0, None
        )
        std_errors = np.sqrt(stratum_variance + weight_variance)

        return ShotReport(
            fingerprint=self.scenario.fingerprint,
            seed=self.seed,
            shots_requested=shots,
            accepted=accepted,
            acceptance_rate=accepted / shots,
            counts=joint.sum(axis=0).reshape(self.scenario.path_shape),
            estimates=np.clip(estimates, 0.0, 1.0).reshape(self.scenario.path_shape),
            std_errors=std_errors.reshape(self.scenario.path_shape),
            stage1_frequencies=frequencies,
            accepted_by_eigenstate=accepted_by_s,
            flags=tuple(flags),
        )


def sample_protocol(
    scenario: Scenario, shots: int, seed: int, workers: Optional[int] = None
) -> ShotReport:
    """
    Simulate the protocol and return stratified estimates of the path probabilities.

    The estimator is sum_s P^_s freq(x|s), with P^_s the single-copy stage 1
    frequency; raw accepted frequencies would weight paths by P_s^(N+1) instead.
    """
    return ProtocolSampler(scenario, seed, workers=workers).run(shots)


def expected_acceptance(scenario: Scenario) -> float:
    """Probability that all copies agree in stage 1, sum_s P_s^(N+1)"""
    return math.fsum(float(p) ** scenario.copies for p in scenario.populations)


def convergence_table(
    scenario: Scenario,
    shot_ladder: Sequence[int],
    seed: int,
    repeats: int = 1,
    workers: Optional[int] = None,
) -> List[ConvergenceRow]:
    """
    Max absolute estimation error per rung of the shot ladder; the rms column is
    taken over `repeats` consecutive seeds starting at `seed`.
    """
    ladder = [int(shots) for shots in shot_ladder]
    if not ladder:
        raise InvalidShots("the shot ladder is empty")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidShots(f"the shot ladder must increase: {ladder}")
    if repeats < 1:
        raise InvalidShots(f"repeats must be at least 1, got {repeats}")
    exact = joint_distribution(scenario).probabilities

    rows = []
    for shots in ladder:
        errors, rates = [], []
        for r in range(repeats):
            report = sample_protocol(scenario, shots, (seed + r) % MAX_SEED, workers)
            errors.append(float(np.max(np.abs(report.estimates - exact))))
            rates.append(report.acceptance_rate)
        rows.append(
            ConvergenceRow(
                shots=shots,
                max_abs_error=errors[0],
                rms_error=math.sqrt(math.fsum(e * e for e in errors) / repeats),
                acceptance_rate=rates[0],
            )
        )
    return rows
