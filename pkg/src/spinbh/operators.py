"""Sparse Hamiltonians and observables.

Builders assemble operators from site-local matrices embedded into the full
tensor-product space.  Operator products are applied right to left, exactly
as composition of linear maps; no normal-ordering rewrites are performed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

from .errors import InvalidSpecError
from .hilbert import FockBasis
from .model import SpinModelSpec

if TYPE_CHECKING:
    from .mapping import JJAParams

DROP_THRESHOLD = 1e-15
HERMITIAN_TOL = 1e-12
MAX_SPIN_SITES = 24


@dataclass(frozen=True)
class SparseOperator:
    """Compressed-row complex matrix with a measured (never assumed) hermitian flag."""

    matrix: sp.csr_matrix
    hermitian: bool

    @classmethod
    def from_matrix(cls, matrix) -> "SparseOperator":
        m = sp.csr_matrix(matrix, dtype=complex)
        m.sum_duplicates()
        if m.nnz:
            m.data[np.abs(m.data) <= DROP_THRESHOLD] = 0.0
        m.eliminate_zeros()
        m.sort_indices()
        dev = hermiticity_deviation(m)
        return cls(matrix=m, hermitian=bool(dev <= HERMITIAN_TOL))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def hermiticity_deviation(matrix: sp.spmatrix) -> float:
    diff = matrix - matrix.getH()
    return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


@dataclass(frozen=True)
class LocalOperatorSet:
    """Site-local d x d matrices: ladder operators, number operator, identity,
    plus the hard-core boson images of the spin operators (valid on n <= 1)."""

    local_dim: int
    a: np.ndarray
    adag: np.ndarray
    n: np.ndarray
    ident: np.ndarray
    hp_sp: np.ndarray  # a^dag (1 - n)
    hp_sm: np.ndarray  # (1 - n) a
    hp_sz: np.ndarray  # n - 1/2
    # spin-1/2 matrices, present only for local_dim = 2
    sx: np.ndarray | None = None
    sy: np.ndarray | None = None
    sz: np.ndarray | None = None
    sp: np.ndarray | None = None
    sm: np.ndarray | None = None


def local_ops(local_dim: int) -> LocalOperatorSet:
    d = local_dim
    if d < 2:
        raise ValueError("local dimension must be >= 2")
    a = np.zeros((d, d), dtype=complex)
    for k in range(1, d):
        a[k - 1, k] = np.sqrt(k)
    adag = a.conj().T
    n = adag @ a
    ident = np.eye(d, dtype=complex)
    hp_sp = adag @ (ident - n)
    hp_sm = (ident - n) @ a
    hp_sz = n - 0.5 * ident
    extra = {}
    if d == 2:
        extra = {"sp": hp_sp, "sm": hp_sm, "sz": hp_sz,
                 "sx": 0.5 * (hp_sp + hp_sm), "sy": -0.5j * (hp_sp - hp_sm)}
    return LocalOperatorSet(local_dim=d, a=a, adag=adag, n=n, ident=ident,
                            hp_sp=hp_sp, hp_sm=hp_sm, hp_sz=hp_sz, **extra)


def _embed_csr(basis: FockBasis, site: int, local: np.ndarray) -> sp.csr_matrix:
    d = basis.local_dim
    if local.shape != (d, d):
        raise ValueError(f"local operator must be {d}x{d}, got {local.shape}")
    if not 0 <= site < basis.n_sites:
        raise ValueError(f"site {site} outside [0, {basis.n_sites})")
    # site 0 is least significant, so it is the last kron factor
    low = sp.identity(d**site, dtype=complex, format="csr")
    high = sp.identity(d ** (basis.n_sites - site - 1), dtype=complex, format="csr")
    return sp.kron(high, sp.kron(sp.csr_matrix(local), low, format="csr"), format="csr")


def embed(basis: FockBasis, site: int, local: np.ndarray) -> SparseOperator:
    """Identity everywhere except ``local`` acting on ``site``."""
    return SparseOperator.from_matrix(_embed_csr(basis, site, np.asarray(local, dtype=complex)))


def build_h_spin(spec: SpinModelSpec) -> SparseOperator:
    """Heisenberg Hamiltonian on the 2^N spin space,
    -sum_{j<k} J_jk ((S+_j S-_k + S-_j S+_k)/2 + S^z_j S^z_k) + sum_j h_j S^z_j."""
    if spec.n_sites > MAX_SPIN_SITES:
        raise InvalidSpecError(f"spin builder limited to {MAX_SPIN_SITES} sites")
    basis = FockBasis(spec.n_sites, 2)
    ops = local_ops(2)
    site_sp = [_embed_csr(basis, s, ops.sp) for s in range(spec.n_sites)]
    site_sm = [_embed_csr(basis, s, ops.sm) for s in range(spec.n_sites)]
    site_sz = [_embed_csr(basis, s, ops.sz) for s in range(spec.n_sites)]
    h = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for j, k, coupling in spec.edges:
        h = h - coupling * (
            0.5 * (site_sp[j] @ site_sm[k]) + 0.5 * (site_sm[j] @ site_sp[k])
            + site_sz[j] @ site_sz[k]
        )
    for j, field in enumerate(spec.fields):
        if field != 0.0:
            h = h + field * site_sz[j]
    return SparseOperator.from_matrix(h)


def build_h_ebh(spec: SpinModelSpec, basis: FockBasis) -> SparseOperator:
    """Bosonic image of the spin model: extended Bose-Hubbard Hamiltonian with
    occupation-dependent hopping,

        -sum_{j<k} (J/2) (a+_j a_k - a+_j (n_j + n_k) a_k + h.c.)
        -sum_{j<k} J (n_j - 1/2)(n_k - 1/2) + sum_j h_j (n_j - 1/2).

    The correlated hopping cancels every matrix element out of the hard-core
    subspace, which stays exactly invariant at any local cutoff."""
    if basis.n_sites != spec.n_sites:
        raise InvalidSpecError("basis and spec disagree on the number of sites")
    ops = local_ops(basis.local_dim)
    eye = sp.identity(basis.dim, dtype=complex, format="csr")
    site_a = [_embed_csr(basis, s, ops.a) for s in range(basis.n_sites)]
    site_ad = [_embed_csr(basis, s, ops.adag) for s in range(basis.n_sites)]
    site_n = [_embed_csr(basis, s, ops.n) for s in range(basis.n_sites)]
    h = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for j, k, coupling in spec.edges:
        hop = site_ad[j] @ site_a[k]
        corr = site_ad[j] @ (site_n[j] + site_n[k]) @ site_a[k]
        half = -(coupling / 2.0) * (hop - corr)
        h = h + half + half.getH()
        h = h - coupling * ((site_n[j] - 0.5 * eye) @ (site_n[k] - 0.5 * eye))
    for j, field in enumerate(spec.fields):
        if field != 0.0:
            h = h + field * (site_n[j] - 0.5 * eye)
    return SparseOperator.from_matrix(h)


def build_h_dm(spec: SpinModelSpec, basis: FockBasis) -> SparseOperator:
    """Alternative boson encoding with S- mapped to a bare annihilator.

    Non-Hermitian whenever the cutoff exceeds 2 and any coupling is nonzero;
    on the hard-core subspace it agrees with the symmetric encoding."""
    if basis.n_sites != spec.n_sites:
        raise InvalidSpecError("basis and spec disagree on the number of sites")
    ops = local_ops(basis.local_dim)
    site_sp = [_embed_csr(basis, s, ops.adag @ (ops.ident - ops.n)) for s in range(basis.n_sites)]
    site_sm = [_embed_csr(basis, s, ops.a) for s in range(basis.n_sites)]
    site_sz = [_embed_csr(basis, s, ops.n - 0.5 * ops.ident) for s in range(basis.n_sites)]
    h = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for j, k, coupling in spec.edges:
        h = h - coupling * (
            0.5 * (site_sp[j] @ site_sm[k]) + 0.5 * (site_sm[j] @ site_sp[k])
            + site_sz[j] @ site_sz[k]
        )
    for j, field in enumerate(spec.fields):
        if field != 0.0:
            h = h + field * site_sz[j]
    return SparseOperator.from_matrix(h)


def build_h_jja(params: "JJAParams", basis: FockBasis, variant: str = "simplified") -> SparseOperator:
    """Rotating-wave Hamiltonian of the Josephson-junction array.

    Per site: (omega + delta_omega - delta_tilde) n, and for the full variant
    the on-site anharmonicity (delta_omega/2) a+ a+ a a.  Per interior link:
    linear hopping t (a+_j a_{j+1} + h.c.), cross-Kerr -Delta n_j n_{j+1},
    correlated hopping T (a+_j n_j a_{j+1} + h.c.) + T' (a+_j n_{j+1} a_{j+1}
    + h.c.), and for the full variant the pair hopping
    -(Delta/4) (a_{j+1}^2 (a+_j)^2 + h.c.).

    At cutoff 2 the anharmonic and pair-hopping terms vanish identically, so
    both variants produce the same matrix.
    """
    if variant not in ("simplified", "full"):
        raise ValueError(f"unknown variant {variant!r}")
    n_sites = basis.n_sites
    if params.n_sites != n_sites:
        raise InvalidSpecError("params and basis disagree on the number of sites")
    ops = local_ops(basis.local_dim)
    site_a = [_embed_csr(basis, s, ops.a) for s in range(n_sites)]
    site_ad = [_embed_csr(basis, s, ops.adag) for s in range(n_sites)]
    site_n = [_embed_csr(basis, s, ops.n) for s in range(n_sites)]
    h = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for s in range(n_sites):
        coeff = params.omega[s] + params.delta_omega[s] - params.delta_tilde[s]
        h = h + coeff * site_n[s]
        if variant == "full":
            anharm = _embed_csr(basis, s, ops.adag @ ops.adag @ ops.a @ ops.a)
            h = h + (params.delta_omega[s] / 2.0) * anharm
    for i in range(n_sites - 1):
        j, k = i, i + 1
        h = h + params.t[i] * (site_ad[j] @ site_a[k] + site_ad[k] @ site_a[j])
        h = h - params.delta[i] * (site_n[j] @ site_n[k])
        corr = (params.corr_t[i] * (site_ad[j] @ site_n[j] @ site_a[k])
                + params.corr_tp[i] * (site_ad[j] @ site_n[k] @ site_a[k]))
        h = h + corr + corr.getH()
        if variant == "full":
            pair = -(params.delta[i] / 4.0) * (site_a[k] @ site_a[k] @ site_ad[j] @ site_ad[j])
            h = h + pair + pair.getH()
    return SparseOperator.from_matrix(h)


OBSERVABLE_NAMES = ("sz1", "mx", "cxx")


def observable(name: str, sector: str, basis: FockBasis) -> SparseOperator:
    """Benchmark observables.

    sz1   z magnetization of the first site (boson: n_0 - 1/2)
    mx    mean x magnetization (boson: mean quadrature (a + a+)/2)
    cxx   x-x correlator of the first two sites
    """
    if sector not in ("spin", "boson"):
        raise ValueError(f"unknown sector {sector!r}")
    if sector == "spin" and basis.local_dim != 2:
        raise ValueError("spin sector requires local_dim = 2")
    ops = local_ops(basis.local_dim)
    if sector == "spin":
        x_local = np.asarray(ops.sx)
        z_local = np.asarray(ops.sz)
    else:
        x_local = 0.5 * (ops.a + ops.adag)
        z_local = ops.n - 0.5 * ops.ident
    if name == "sz1":
        return SparseOperator.from_matrix(_embed_csr(basis, 0, z_local))
    if name == "mx":
        total = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for s in range(basis.n_sites):
            total = total + _embed_csr(basis, s, x_local)
        return SparseOperator.from_matrix(total / basis.n_sites)
    if name == "cxx":
        if basis.n_sites < 2:
            raise ValueError("cxx needs at least two sites")
        return SparseOperator.from_matrix(
            _embed_csr(basis, 0, x_local) @ _embed_csr(basis, 1, x_local)
        )
    raise ValueError(f"unknown observable {name!r}; expected one of {OBSERVABLE_NAMES}")


def dump_triplets(op: SparseOperator, path) -> None:
    """Write the stored entries as 'row col re im' lines for external checks."""
    coo = op.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for i in order:
            re, im = float(coo.data[i].real), float(coo.data[i].imag)
            fh.write(f"{coo.row[i]} {coo.col[i]} {re!r} {im!r}\n")
