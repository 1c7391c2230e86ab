"""Absorption/phase sweeps through the compiled CPA mesh."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..analysis.fitting import fisher_from_fit, fit_sinusoid, visibility_and_phase
from ..analysis.metrology import PhaseCurve, bhattacharyya, fisher_per_outcome
from ..circuits.clements import (
    MeshProgram,
    compile_cpa,
    output_phase_relation,
    reconstruct,
)
from ..circuits.lossybs import LossyBeamSplitter
from ..exceptions import DegenerateFitError, InvalidInputError
from ..quantum.fock import (
    FockBasis,
    InputState,
    ProbabilityDistribution,
    enumerate_basis,
    phase_response,
    photon_unitary,
)
from ..utils.decorators import measure_time
from .config import SweepConfig
from .sampling import normalize_counts, number_resolving_correction, sample_counts

logger = logging.getLogger(__name__)

N_MODES = 3
SIGNAL_PORTS = ((1, 0, 0), (0, 1, 0))


@dataclass
class SweepResult:
    """Sweep output on an (absorption, phase) grid.

    Arrays indexed ``[i_alpha, i_phi, i_state]`` over ``basis.states``.
    ``counts`` are number-resolving corrected; the sampled fields are None for
    theory-only runs.
    """

    config: SweepConfig
    basis: FockBasis
    alphas: np.ndarray
    phis: np.ndarray
    theory: np.ndarray
    first: np.ndarray
    second: np.ndarray
    programs: List[MeshProgram]
    counts: Optional[np.ndarray] = None
    normalized: Optional[np.ndarray] = None
    sigmas: Optional[np.ndarray] = None

    @property
    def sampled(self) -> bool:
        return self.counts is not None

    def distribution(self, i_alpha: int, i_phi: int) -> ProbabilityDistribution:
        return ProbabilityDistribution(self.basis, self.theory[i_alpha, i_phi])

    def measured_distribution(
        self, i_alpha: int, i_phi: int
    ) -> ProbabilityDistribution:
        self._require_samples()
        return ProbabilityDistribution(
            self.basis, self.normalized[i_alpha, i_phi], self.sigmas[i_alpha, i_phi]
        )

    def curve(self, i_alpha: int, state: Sequence[int]) -> PhaseCurve:
        """Theory curve of one outcome with exact derivatives."""
        k = self.basis.index(state)
        return PhaseCurve(
            self.phis,
            self.theory[i_alpha, :, k],
            label=self.basis.labels()[k],
            derivatives=self.first[i_alpha, :, k],
            curvatures=self.second[i_alpha, :, k],
        )

    def measured_curve(self, i_alpha: int, state: Sequence[int]) -> PhaseCurve:
        self._require_samples()
        k = self.basis.index(state)
        return PhaseCurve(
            self.phis, self.normalized[i_alpha, :, k], label=self.basis.labels()[k]
        )

    def to_frame(self) -> pd.DataFrame:
        """One row per (alpha, phi) in grid order."""
        n_alpha, n_phi, _ = self.theory.shape
        columns: Dict[str, np.ndarray] = {
            "alpha": np.repeat(self.alphas, n_phi),
            "phi": np.tile(self.phis, n_alpha),
        }
        blocks = [("theory", self.theory)]
        if self.sampled:
            blocks += [
                ("counts", self.counts),
                ("normalized", self.normalized),
                ("sigma", self.sigmas),
            ]
        labels = self.basis.labels()
        for suffix, data in blocks:
            flat = data.reshape(n_alpha * n_phi, len(labels))
            for k, label in enumerate(labels):
                columns[f"outcome_{label}_{suffix}"] = flat[:, k]
        return pd.DataFrame(columns)

    def _require_samples(self) -> None:
        if not self.sampled:
            raise InvalidInputError("sweep was run without sampling")


@dataclass
class _DeviceRun:
    program: MeshProgram
    probabilities: np.ndarray
    first: np.ndarray
    second: np.ndarray
    counts: Optional[np.ndarray]
    normalized: Optional[np.ndarray]
    sigmas: Optional[np.ndarray]


class SweepRunner:
    """Evaluates a SweepConfig device by device."""

    def __init__(self, config: SweepConfig, workers: int = 1, progress: bool = True):
        """Initialize sweep runner.

        Args:
            config: Sweep parameters
            workers: Concurrent device evaluations
            progress: Show a progress bar over the absorption grid
        """
        if workers < 1:
            raise InvalidInputError(f"workers must be >= 1, got {workers}")
        self.config = config
        self.workers = workers
        self.progress = progress
        self.basis = enumerate_basis(N_MODES, config.input_state.n_photons)

    def compile(self, bs: LossyBeamSplitter) -> MeshProgram:
        program = compile_cpa(bs)
        if self.config.filter_offset:
            program = program.with_phase_offset(0, self.config.filter_offset)
        return program

    def _sample_point(
        self, probabilities: np.ndarray, i_alpha: int, i_phi: int
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        cfg = self.config
        stream = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(i_alpha, i_phi))
        dist = ProbabilityDistribution(self.basis, probabilities)
        counts = sample_counts(dist, cfg.shots, cfg.efficiencies, seed=stream)
        if cfg.input_state is InputState.NOON:
            counts = number_resolving_correction(counts)
        measured = normalize_counts(counts, cfg.efficiencies)
        ordered = np.array([counts[s] for s in self.basis.states], dtype=np.int64)
        return ordered, measured.probabilities, measured.sigmas

    def _run_device(self, i_alpha: int, bs: LossyBeamSplitter) -> _DeviceRun:
        program = self.compile(bs)
        fock = photon_unitary(reconstruct(program), self.config.input_state.n_photons)
        response = phase_response(
            fock, self.config.input_state, self.config.phis, N_MODES
        )
        logger.debug(f"Device {i_alpha} (alpha={bs.absorption:.6g}) evaluated")

        counts = normalized = sigmas = None
        if self.config.shots is not None:
            points = [
                self._sample_point(response.probabilities[i_phi], i_alpha, i_phi)
                for i_phi in range(response.phis.size)
            ]
            counts = np.stack([p[0] for p in points])
            normalized = np.stack([p[1] for p in points])
            sigmas = np.stack([p[2] for p in points])
        return _DeviceRun(
            program,
            response.probabilities,
            response.first,
            response.second,
            counts,
            normalized,
            sigmas,
        )

    @measure_time
    def run(self) -> SweepResult:
        """Run the sweep.

        Returns:
            SweepResult in absorption-grid order, independent of scheduling
        """
        cfg = self.config
        devices = cfg.devices()
        logger.info("=" * 70)
        logger.info(
            f"Sweep '{cfg.name}': {cfg.bs_kind.value}, {cfg.input_state.value}, "
            f"{len(devices)} absorption(s) x {cfg.phi_count} phases"
        )
        logger.info("=" * 70)

        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            runs = list(
                tqdm(
                    executor.map(self._run_device, range(len(devices)), devices),
                    total=len(devices),
                    desc="Sweeping absorption",
                    disable=not self.progress,
                )
            )

        result = SweepResult(
            config=cfg,
            basis=self.basis,
            alphas=np.array([bs.absorption for bs in devices]),
            phis=cfg.phis,
            theory=np.stack([r.probabilities for r in runs]),
            first=np.stack([r.first for r in runs]),
            second=np.stack([r.second for r in runs]),
            programs=[r.program for r in runs],
        )
        if cfg.shots is not None:
            result.counts = np.stack([r.counts for r in runs])
            result.normalized = np.stack([r.normalized for r in runs])
            result.sigmas = np.stack([r.sigmas for r in runs])

        logger.info(f"Sweep '{cfg.name}' completed")
        return result


def run_sweep(
    config: SweepConfig, workers: int = 1, progress: bool = False
) -> SweepResult:
    """Evaluate a sweep configuration.

    Raises:
        CpaError: Propagated from device solving, dilation or compilation
    """
    return SweepRunner(config, workers=workers, progress=progress).run()


def _fringe_summary(curve: PhaseCurve, k: int) -> Optional[Dict[str, float]]:
    try:
        fit = fit_sinusoid(curve, k)
    except InvalidInputError as e:
        logger.debug(f"Skipping fringe fit of {curve.label}: {e}")
        return None
    return {
        "amplitude": fit.amplitude,
        "phase": fit.phase,
        "offset": fit.offset,
        "fringe_shift": fit.fringe_shift,
        "residual_rms": fit.residual_rms,
    }


def _fisher_summary(curves: List[PhaseCurve]) -> Dict[str, Any]:
    per_outcome = [fisher_per_outcome(c) for c in curves]
    total = np.sum([c.values for c in per_outcome], axis=0)
    best = int(np.argmax(total))
    return {
        "max_per_outcome": {c.label: c.maximum for c in per_outcome},
        "total_max": float(total[best]),
        "total_argmax_phi": float(curves[0].phis[best]),
    }


def _measured_summary(result: SweepResult, i_alpha: int, k: int) -> Dict[str, Any]:
    overlaps = [
        bhattacharyya(
            result.distribution(i_alpha, i), result.measured_distribution(i_alpha, i)
        )
        for i in range(result.phis.size)
    ]
    summary: Dict[str, Any] = {
        "bhattacharyya": overlaps,
        "bhattacharyya_min": float(min(overlaps)),
    }
    fitted = []
    for state in result.basis.states:
        curve = result.measured_curve(i_alpha, state)
        try:
            fit = fit_sinusoid(curve, k)
        except InvalidInputError:
            continue
        fi = fisher_from_fit(fit, result.phis)
        fi.label = curve.label
        fitted.append(fi)
    if fitted:
        total = np.sum([c.values for c in fitted], axis=0)
        summary["fisher_max_per_outcome"] = {c.label: c.maximum for c in fitted}
        summary["fisher_total_max"] = float(total.max())
    return summary


def analyze_sweep(result: SweepResult) -> Dict[str, Any]:
    """Fisher information, fringe fits and overlaps for every absorption.

    Returns:
        JSON-ready dictionary
    """
    cfg = result.config
    k = cfg.input_state.fringe_order
    entries = []
    for i_alpha, alpha in enumerate(result.alphas):
        curves = [result.curve(i_alpha, s) for s in result.basis.states]
        entry: Dict[str, Any] = {
            "alpha": float(alpha),
            "program": result.programs[i_alpha].to_dict(),
            "output_phase_relation": output_phase_relation(result.programs[i_alpha]),
            "fisher": _fisher_summary(curves),
            "fringes": {c.label: _fringe_summary(c, k) for c in curves},
        }
        if cfg.input_state is InputState.SINGLE_PHOTON:
            entry["visibility"] = _visibility_summary(result, i_alpha)
        if result.sampled:
            entry["measured"] = _measured_summary(result, i_alpha, k)
        entries.append(entry)
    return {
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash,
        "basis": result.basis.labels(),
        "absorptions": entries,
    }


def _visibility_summary(
    result: SweepResult, i_alpha: int
) -> Optional[Dict[str, float]]:
    try:
        s1, s2 = (fit_sinusoid(result.curve(i_alpha, port), 1) for port in SIGNAL_PORTS)
        v1, v2, relative = visibility_and_phase(s1, s2)
    except (InvalidInputError, DegenerateFitError) as e:
        logger.debug(f"No visibility for alpha index {i_alpha}: {e}")
        return None
    return {"s1": v1, "s2": v2, "relative_phase": relative}


__all__ = ["SweepResult", "SweepRunner", "analyze_sweep", "run_sweep"]
