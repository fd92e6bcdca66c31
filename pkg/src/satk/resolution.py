"""Modulus resolutions {F_j} and the closed-form limit of the normalized power sequence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .decomp import DunfordDecomposition
from .errors import InvalidInput

MEMBERSHIP_TOL = 1e-8


def cluster_values(values, tol: float) -> list[list[int]]:
    """Group indices of sorted-comparable real values whose gaps are <= tol (single linkage)."""
    order = np.argsort(values)
    groups: list[list[int]] = []
    for idx in order:
        if groups and values[idx] - values[groups[-1][-1]] <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


@dataclass(frozen=True)
class ModulusResolution:
    """Increasing orthogonal projections F_1 <= ... <= F_k = I at the distinct eigenvalue moduli."""

    moduli: tuple
    projections: tuple
    source: DunfordDecomposition
    # e_j = sum of idempotents with modulus level <= j; oblique, used for membership tests
    idempotent_sums: tuple


@dataclass(frozen=True)
class LimitOperator:
    """The PSD limit of |A^n|^(1/n): K = sum_j a_j (F_j - F_{j-1})."""

    matrix: np.ndarray
    spectrum_moduli: tuple


@dataclass(frozen=True)
class ResolutionDiagnostics:
    max_idempotency_residual: float
    max_monotonicity_violation: float
    top_identity_gap: float

    def within(self, tol: float) -> bool:
        return (
            self.max_idempotency_residual <= tol
            and self.max_monotonicity_violation <= tol
            and self.top_identity_gap <= tol
        )


def modulus_resolution(
    dec: DunfordDecomposition, modulus_tol: float | None = None
) -> ModulusResolution:
    """Build the orthogonal resolution F_j = R(e_A(D_{a_j})) over clustered moduli.

    Distinct complex clusters with coinciding modulus merge into one level, as
    the discs demand.
    """
    if modulus_tol is None:
        modulus_tol = 1e-6 * max(1.0, linalg.norm2(dec.matrix))
    mods = np.array([abs(p.cluster.representative) for p in dec.idempotents])
    groups = cluster_values(mods, modulus_tol)
    moduli = []
    projections = []
    idem_sums = []
    acc = np.zeros((dec.dim, dec.dim), dtype=np.complex128)
    for group in groups:
        moduli.append(float(np.mean(mods[group])))
        for idx in group:
            acc = acc + dec.idempotents[idx].matrix
        idem_sums.append(acc.copy())
        projections.append(linalg.range_projection(acc))
    # top level covers everything: force the exact identity
    projections[-1] = np.eye(dec.dim, dtype=np.complex128)
    return ModulusResolution(
        moduli=tuple(moduli),
        projections=tuple(projections),
        source=dec,
        idempotent_sums=tuple(idem_sums),
    )


def limit_operator(res: ModulusResolution) -> LimitOperator:
    """Closed form K = sum_j a_j (F_j - F_{j-1})."""
    dim = res.source.dim
    k = np.zeros((dim, dim), dtype=np.complex128)
    prev = np.zeros((dim, dim), dtype=np.complex128)
    for a, f in zip(res.moduli, res.projections):
        k += a * (f - prev)
        prev = f
    return LimitOperator(matrix=0.5 * (k + k.conj().T), spectrum_moduli=res.moduli)


def vector_exponent_exact(
    dec: DunfordDecomposition, x, tol: float = MEMBERSHIP_TOL
) -> float:
    """Smallest modulus level whose spectral idempotent range contains x.

    The zero vector lies in every range, so it maps to 0.
    """
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.shape[0] != dec.dim:
        raise InvalidInput(f"vector has length {x.shape[0]}, expected {dec.dim}")
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return 0.0
    res = modulus_resolution(dec)
    for a, e in zip(res.moduli, res.idempotent_sums):
        if np.linalg.norm(e @ x - x) <= tol * nx:
            return float(a)
    return float(res.moduli[-1])


def check_resolution(res: ModulusResolution) -> ResolutionDiagnostics:
    """Idempotency, monotonicity, and top-element diagnostics for a resolution."""
    idem = 0.0
    mono = 0.0
    prev = None
    for f in res.projections:
        idem = max(idem, linalg.norm2(f @ f - f), linalg.norm2(f - f.conj().T))
        if prev is not None:
            low = float(np.linalg.eigvalsh(0.5 * (f + f.conj().T) - prev)[0])
            mono = max(mono, -min(low, 0.0))
        prev = 0.5 * (f + f.conj().T)
    top_gap = linalg.norm2(res.projections[-1] - np.eye(res.source.dim))
    return ResolutionDiagnostics(
        max_idempotency_residual=float(idem),
        max_monotonicity_violation=float(mono),
        top_identity_gap=float(top_gap),
    )
