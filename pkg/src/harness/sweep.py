"""
Seeded Monte Carlo sweeps over the protocols.

Every (point, trial) pair is an independent work item. Its seed is derived
from the master seed and its position, so records do not depend on the
thread count or on scheduling.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import structlog

from core.covariance import (
    CovarianceModel,
    build_block_covariance,
    frobenius_norm,
    operator_norm,
    random_contraction,
    sample,
)
from core.models import ExperimentConfig, NormKind, Scheme, TrialRecord
from core.seeding import derive_seed, make_rng
from protocol.interactive import interactive_run
from protocol.messages import write_frames
from protocol.multi_agent import run_multi_agent
from protocol.params import multi_agent_params, two_agent_params
from protocol.two_agent import run_two_agent

INT63_SHIFT = 1
DATA_STREAM = 0
PROTOCOL_STREAM = 1

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class SweepPoint:
    index: int
    m: int
    budget: Optional[int]
    eps: Optional[float]
    levels: Optional[int]


def sweep_points(cfg: ExperimentConfig) -> List[SweepPoint]:
    """Cartesian product of the sweep axes, m varying slowest."""
    axes = itertools.product(cfg.m, cfg.budget or [None], cfg.eps or [None], cfg.levels or [None])
    return [SweepPoint(i, m, b, e, lv) for i, (m, b, e, lv) in enumerate(axes)]


def build_model(cfg: ExperimentConfig) -> CovarianceModel:
    """Ground truth (sigma^2/2)[[I, delta D^T], [delta D, I]] with D drawn from d_seed."""
    D = random_contraction(cfg.d2, cfg.d1, make_rng(cfg.d_seed))
    return build_block_covariance(cfg.d1, cfg.d2, cfg.sigma, cfg.delta, D, cfg.source)


def trial_seed(master: int, point: int, trial: int) -> int:
    """Position-derived seed, shifted to fit a signed 64-bit column."""
    return derive_seed(master, point, trial) >> INT63_SHIFT


def data_seed(master: int, trial: int) -> int:
    """Seed of the samples of `trial`; the same at every sweep point."""
    return derive_seed(master, trial)


class ExperimentRunner:
    """Runs every (point, trial) of an experiment config."""

    def __init__(self, cfg: ExperimentConfig, threads: int = 1, dump_dir: Optional[str] = None):
        self.cfg = cfg
        self.threads = max(1, int(threads))
        self.dump_dir = Path(dump_dir) if dump_dir else None
        self.model = build_model(cfg)
        self.points = sweep_points(cfg)

    def run(self) -> List[TrialRecord]:
        work = [(p, t) for p in self.points for t in range(self.cfg.trials)]
        logger.info("sweep_started", scheme=self.cfg.scheme.value, points=len(self.points),
                    trials=self.cfg.trials, threads=self.threads)

        if self.threads == 1:
            records = [self.run_trial(p, t) for p, t in work]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                records = list(pool.map(lambda item: self.run_trial(*item), work))

        errors = sum(r.error for r in records)
        logger.info("sweep_finished", records=len(records), errors=errors)
        return records

    def _dump(self, point: SweepPoint, trial: int, messages) -> None:
        if self.dump_dir is not None:
            write_frames(messages, self.dump_dir / f"point{point.index:03d}_trial{trial:04d}")

    def _samples(self, point: SweepPoint, trial: int):
        seed = data_seed(self.cfg.master_seed, trial)
        return sample(self.model, point.m, seed, rng=make_rng(seed, DATA_STREAM))

    def run_trial(self, point: SweepPoint, trial: int) -> TrialRecord:
        seed = trial_seed(self.cfg.master_seed, point.index, trial)
        rng = make_rng(seed, PROTOCOL_STREAM)
        X = self._samples(point, trial)
        scheme = self.cfg.scheme

        if scheme in (Scheme.TWO_AGENT_OP, Scheme.TWO_AGENT_FR):
            fields = self._two_agent(point, trial, X, rng)
        elif scheme == Scheme.MULTI_AGENT:
            fields = self._multi_agent(point, trial, X, rng)
        else:
            fields = self._interactive(point, trial, X, rng)

        return TrialRecord(
            scheme=scheme.value, d1=self.cfg.d1, d2=self.cfg.d2, m=point.m,
            trial=trial, seed=seed, **fields,
        )

    def _distortions(self, estimate: np.ndarray, truth: np.ndarray) -> Tuple[float, float]:
        diff = estimate - truth
        return operator_norm(diff), frobenius_norm(diff)

    def _two_agent(self, point: SweepPoint, trial: int, X, rng) -> dict:
        cfg = self.cfg
        norm = NormKind.OP if cfg.scheme == Scheme.TWO_AGENT_OP else NormKind.FR
        eps = point.eps if point.eps is not None else cfg.sigma ** 2
        params = two_agent_params(cfg.sigma, eps, cfg.d1, cfg.d2, norm, m=point.m,
                                  budgets=(point.budget, point.budget), n=cfg.n)
        x1, x2 = X.split([cfg.d1, cfg.d2])
        estimate, messages = run_two_agent(x1, x2, params, rng)
        self._dump(point, trial, messages)
        dist_op, dist_fr = self._distortions(estimate.c_hat, self.model.cov)
        return dict(n=params.n, B1=point.budget, B2=point.budget,
                    dist_op=dist_op, dist_fr=dist_fr,
                    bits1=messages[0].bits_used, bits2=messages[1].bits_used,
                    error=estimate.error_triggered)

    def _multi_agent(self, point: SweepPoint, trial: int, X, rng) -> dict:
        cfg = self.cfg
        dims = cfg.agent_dims or [d for d in (cfg.d1, cfg.d2) if d > 0]
        eps = point.eps if point.eps is not None else cfg.sigma ** 2
        params = multi_agent_params(cfg.sigma, eps, cfg.d, n=cfg.n or point.m,
                                    clip_radius=cfg.clip_radius, levels=point.levels)
        estimate, messages = run_multi_agent(X, dims, params, rng)
        self._dump(point, trial, messages)
        dist_op, dist_fr = self._distortions(estimate.c_hat, self.model.cov)
        used = [message.bits_used for message in messages]
        return dict(n=params.n, B1=max(params.agent_bits(d) for d in dims),
                    B2=sum(params.agent_bits(d) for d in dims),
                    dist_op=dist_op, dist_fr=dist_fr,
                    bits1=max(used), bits2=sum(used),
                    error=estimate.error_triggered)

    def _interactive(self, point: SweepPoint, trial: int, X, rng) -> dict:
        cfg = self.cfg
        eps = point.eps if point.eps is not None else cfg.sigma ** 2
        alice, bob = X.split([cfg.d1, cfg.d2])
        result = interactive_run(alice, bob, cfg.sigma, eps, rng,
                                 budget_bob=point.budget, n=cfg.n)
        if self.dump_dir is not None:
            out = self.dump_dir / f"point{point.index:03d}_trial{trial:04d}"
            out.mkdir(parents=True, exist_ok=True)
            for index, entry in enumerate(result.entries):
                (out / f"board_{index:02d}_round{entry.round}_{entry.author}.bin").write_bytes(entry.frame)

        c12_hat = np.zeros((cfg.d1, cfg.d2)) if result.c12_hat is None else result.c12_hat
        dist_op, dist_fr = self._distortions(c12_hat, self.model.c12)
        # agent 1 is the broadcaster (the party with more coordinates); its bits are unbudgeted
        bits = result.bits_by_author
        alice_bits, bob_bits = bits.get("alice", 0), bits.get("bob", 0)
        return dict(n=result.params.n, B1=alice_bits, B2=point.budget,
                    dist_op=dist_op, dist_fr=dist_fr,
                    bits1=alice_bits, bits2=bob_bits,
                    error=result.error_triggered)


def run_sweep(cfg: ExperimentConfig, threads: int = 1,
              dump_dir: Optional[str] = None) -> List[TrialRecord]:
    return ExperimentRunner(cfg, threads=threads, dump_dir=dump_dir).run()
