"""Declarative specifications of the spin model and the circuit.

Sites are 0-indexed.  A chain of N sites has N+1 coupling links, indexed
0..N; link l joins sites l-1 and l, so links 0 and N join the edge sites to
ground.  All energies are ordinary frequencies nu = E/(2*pi*hbar) in MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidSpecError

# Above this ratio the charging energy is no longer a small perturbation of
# the Josephson well and the quadratic-oscillator treatment degrades.
TRANSMON_RATIO_WARN = 0.1
# The low-coupling inversion E'_J = E_J (E_coup/E_C) / (1 - 2 E_coup/E_C)
# changes sign at E_coup/E_C = 0.5.
COUPLING_RATIO_LIMIT = 0.5


@dataclass(frozen=True)
class Violation:
    """One entry of a validation report."""

    severity: str  # "error" | "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


@dataclass(frozen=True)
class SpinModelSpec:
    """Coupling graph J_jk and local z-fields h_j of a Heisenberg spin-1/2 model.

    Positive couplings are ferromagnetic: the exchange enters the Hamiltonian
    with an overall minus sign.
    """

    n_sites: int
    edges: tuple[tuple[int, int, float], ...]
    fields: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(j), int(k), float(v)) for j, k, v in self.edges))
        object.__setattr__(self, "fields", tuple(float(h) for h in self.fields))


@dataclass(frozen=True)
class CircuitSpec:
    """Raw junction-array energies: per-site charging and Josephson energies,
    per-link coupling Josephson and capacitive-coupling energies.

    ``eprime_j`` and ``e_coup`` have length n_sites + 1; entries 0 and n_sites
    belong to the grounded boundary links and may be zero.
    """

    n_sites: int
    e_c: tuple[float, ...]
    e_j: tuple[float, ...]
    eprime_j: tuple[float, ...]
    e_coup: tuple[float, ...]

    def __post_init__(self):
        for name in ("e_c", "e_j", "eprime_j", "e_coup"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))

    def inductive_energies(self) -> tuple[float, ...]:
        """Per-site E_L: own Josephson energy plus both adjacent link energies."""
        return tuple(
            self.e_j[s] + self.eprime_j[s] + self.eprime_j[s + 1] for s in range(self.n_sites)
        )


def chain_spec(n_sites: int, coupling: float, field: float) -> SpinModelSpec:
    """Homogeneous open chain: nearest-neighbor coupling J and uniform field h."""
    if n_sites < 1:
        raise InvalidSpecError(f"chain needs at least one site, got {n_sites}")
    if not (math.isfinite(coupling) and math.isfinite(field)):
        raise InvalidSpecError("coupling and field must be finite")
    edges = tuple((j, j + 1, coupling) for j in range(n_sites - 1))
    return SpinModelSpec(n_sites=n_sites, edges=edges, fields=(field,) * n_sites)


def chain_circuit(
    n_sites: int,
    e_c: float,
    e_j: float,
    eprime_j: float,
    e_coup: float,
    include_boundary: bool = False,
) -> CircuitSpec:
    """Homogeneous junction-array chain.

    ``include_boundary=True`` gives the grounded boundary links the same
    Josephson energy as the interior ones, which makes the per-site inductive
    energy (and hence the oscillator frequency) uniform along the chain.  The
    boundary capacitive coupling is always zero: a link to ground couples no
    pair of sites.
    """
    if n_sites < 1:
        raise InvalidSpecError(f"chain needs at least one site, got {n_sites}")
    boundary = eprime_j if include_boundary else 0.0
    ep = (boundary,) + (eprime_j,) * (n_sites - 1) + (boundary,)
    ec = (0.0,) + (e_coup,) * (n_sites - 1) + (0.0,)
    return CircuitSpec(
        n_sites=n_sites,
        e_c=(e_c,) * n_sites,
        e_j=(e_j,) * n_sites,
        eprime_j=ep,
        e_coup=ec,
    )


def _validate_spin(spec: SpinModelSpec) -> list[Violation]:
    report = []
    if spec.n_sites < 1:
        report.append(Violation("error", f"n_sites must be >= 1, got {spec.n_sites}"))
    if len(spec.fields) != spec.n_sites:
        report.append(
            Violation("error", f"fields has length {len(spec.fields)}, expected {spec.n_sites}")
        )
    seen = set()
    for j, k, v in spec.edges:
        if not (0 <= j < spec.n_sites and 0 <= k < spec.n_sites):
            report.append(Violation("error", f"edge ({j},{k}) out of range [0,{spec.n_sites})"))
        if j >= k:
            report.append(Violation("error", f"edge ({j},{k}) violates j<k ordering"))
        if (j, k) in seen:
            report.append(Violation("error", f"duplicate edge ({j},{k})"))
        seen.add((j, k))
        if not math.isfinite(v):
            report.append(Violation("error", f"edge ({j},{k}) has non-finite coupling"))
    for j, h in enumerate(spec.fields):
        if not math.isfinite(h):
            report.append(Violation("error", f"field at site {j} is not finite"))
    return report


def _validate_circuit(spec: CircuitSpec) -> list[Violation]:
    report = []
    n = spec.n_sites
    if n < 1:
        report.append(Violation("error", f"n_sites must be >= 1, got {n}"))
        return report
    if len(spec.e_c) != n or len(spec.e_j) != n:
        report.append(Violation("error", "e_c and e_j must have one entry per site"))
        return report
    if len(spec.eprime_j) != n + 1 or len(spec.e_coup) != n + 1:
        report.append(Violation("error", "eprime_j and e_coup must have n_sites+1 entries"))
        return report
    for s in range(n):
        if spec.e_c[s] <= 0:
            report.append(Violation("error", f"e_c[{s}] must be positive"))
        if spec.e_j[s] <= 0:
            report.append(Violation("error", f"e_j[{s}] must be positive"))
        if spec.e_j[s] > 0 and spec.e_c[s] / spec.e_j[s] > TRANSMON_RATIO_WARN:
            report.append(
                Violation(
                    "warning",
                    f"site {s}: e_c/e_j = {spec.e_c[s] / spec.e_j[s]:.3g} exceeds "
                    f"{TRANSMON_RATIO_WARN}; weakly anharmonic regime not satisfied",
                )
            )
    for link in range(n + 1):
        interior = 0 < link < n
        ep, ec = spec.eprime_j[link], spec.e_coup[link]
        if interior and ep <= 0:
            report.append(Violation("error", f"eprime_j[{link}] must be positive on interior links"))
        if not interior and ep < 0:
            report.append(Violation("error", f"eprime_j[{link}] must be >= 0"))
        if ec < 0:
            report.append(Violation("error", f"e_coup[{link}] must be >= 0"))
        if interior:
            ratio = ec / spec.e_c[link - 1]
            if ratio >= COUPLING_RATIO_LIMIT:
                report.append(
                    Violation(
                        "error",
                        f"link {link}: e_coup/e_c = {ratio:.3g} is at or beyond "
                        f"{COUPLING_RATIO_LIMIT}, where the low-coupling inversion diverges",
                    )
                )
    return report


def validate(spec: SpinModelSpec | CircuitSpec) -> list[Violation]:
    """Report-only validation; an empty list means the spec is usable."""
    if isinstance(spec, SpinModelSpec):
        return _validate_spin(spec)
    if isinstance(spec, CircuitSpec):
        return _validate_circuit(spec)
    raise TypeError(f"cannot validate {type(spec).__name__}")


def has_errors(report: list[Violation]) -> bool:
    return any(v.severity == "error" for v in report)
