"""Equivalence machinery: projected comparison of a boson Hamiltonian against
a spin Hamiltonian, leakage-block norms, and trajectory-distance reports.

Encoded Hamiltonians may differ from the spin model by a multiple of the
identity (constant terms are dropped at different stages of different
constructions), so matrix comparisons first fit a scalar offset by trace
matching, which is the least-squares optimal choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dynamics import Trajectory
from .operators import SparseOperator, hermiticity_deviation


@dataclass(frozen=True)
class EquivalenceReport:
    """Result of comparing a projected boson Hamiltonian with a spin one."""

    offset_mhz: float
    residual_max: float
    residual_frobenius: float
    coupling_norm: float  # largest |<q|H_boson|p>| out of the projected subspace
    hermiticity_boson: float
    hermiticity_spin: float
    n_sites: int
    local_dim: int
    physical_dim: int

    def lines(self, precision: int = 12) -> list[str]:
        def fmt(x):
            return format(x, f".{precision}g")

        return [
            f"n_sites = {self.n_sites}",
            f"local_dim = {self.local_dim}",
            f"physical_dim = {self.physical_dim}",
            f"offset_mhz = {fmt(self.offset_mhz)}",
            f"residual_max = {fmt(self.residual_max)}",
            f"residual_frobenius = {fmt(self.residual_frobenius)}",
            f"coupling_norm = {fmt(self.coupling_norm)}",
            f"hermiticity_boson = {fmt(self.hermiticity_boson)}",
            f"hermiticity_spin = {fmt(self.hermiticity_spin)}",
        ]


def project(op: SparseOperator, mask) -> tuple[SparseOperator, float]:
    """Sub-matrix on the index set ``mask`` plus the largest matrix element
    coupling the mask into its complement (rows outside, columns inside)."""
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise ValueError("mask must not be empty")
    if np.any(mask < 0) or np.any(mask >= op.dim) or np.any(np.diff(mask) <= 0):
        raise ValueError("mask must be sorted, unique, and within range")
    csr = op.matrix
    php = csr[mask][:, mask]
    comp = np.setdiff1d(np.arange(op.dim, dtype=np.int64), mask, assume_unique=True)
    if comp.size:
        qhp = csr[comp][:, mask]
        coupling = float(np.max(np.abs(qhp.data))) if qhp.nnz else 0.0
    else:
        coupling = 0.0
    return SparseOperator.from_matrix(php), coupling


def compare_projected(h_boson: SparseOperator, h_spin: SparseOperator, mask) -> EquivalenceReport:
    """Fit the identity offset and report entrywise and Frobenius residuals of
    P H_boson P - (H_spin + c I) on the projected subspace."""
    php, coupling = project(h_boson, mask)
    if php.dim != h_spin.dim:
        raise ValueError(f"projected dim {php.dim} does not match spin dim {h_spin.dim}")
    dim = php.dim
    trace_boson = complex(php.matrix.diagonal().sum())
    trace_spin = complex(h_spin.matrix.diagonal().sum())
    offset = (trace_boson - trace_spin).real / dim
    resid = php.matrix - h_spin.matrix - offset * sp.identity(dim, dtype=complex, format="csr")
    if resid.nnz:
        residual_max = float(np.max(np.abs(resid.data)))
        residual_frob = float(np.sqrt(np.sum(np.abs(resid.data) ** 2)))
    else:
        residual_max = residual_frob = 0.0
    basis_sites = int(round(np.log2(dim)))
    local_dim = int(round(h_boson.dim ** (1.0 / basis_sites))) if basis_sites else 2
    return EquivalenceReport(
        offset_mhz=offset,
        residual_max=residual_max,
        residual_frobenius=residual_frob,
        coupling_norm=coupling,
        hermiticity_boson=hermiticity_deviation(h_boson.matrix),
        hermiticity_spin=hermiticity_deviation(h_spin.matrix),
        n_sites=basis_sites,
        local_dim=local_dim,
        physical_dim=dim,
    )


@dataclass(frozen=True)
class TrajectoryDistance:
    """Per-observable max-abs and RMS differences between two trajectories."""

    max_abs: dict[str, float]
    rms: dict[str, float]
    overall_max: float


def compare_trajectories(a: Trajectory, b: Trajectory) -> TrajectoryDistance:
    if a.times.shape != b.times.shape or not np.array_equal(a.times, b.times):
        raise ValueError("trajectories must share an identical time grid")
    names = [n for n in a.values if n in b.values]
    if set(a.values) != set(b.values):
        raise ValueError("trajectories record different observables")
    max_abs, rms = {}, {}
    overall = 0.0
    for name in names:
        diff = np.abs(a.values[name] - b.values[name])
        max_abs[name] = float(np.max(diff))
        rms[name] = float(np.sqrt(np.mean(diff**2)))
        overall = max(overall, max_abs[name])
    return TrajectoryDistance(max_abs=max_abs, rms=rms, overall_max=overall)
