"""Finite-level spectral computation.

Converts group-ring matrices over finite groups into Hermitian matrices via
the left regular representation (or a character-basis shortcut for products
of cyclic groups), extracts eigenvalue lists, and packages them as
right-continuous spectral step functions with normalized total mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfiniteGroup, MalformedGroup, NotHermitian
from .groups import Group, Homomorphism
from .matrices import RingMatrix, k_bound

DEFAULT_EIG_TOL = 1e-12
KERNEL_THRESHOLD_FACTOR = 1e-9


def default_kernel_threshold(delta: RingMatrix) -> float:
    """Relative zero-eigenvalue cutoff: 1e-9 times the a-priori norm bound."""
    return KERNEL_THRESHOLD_FACTOR * max(1.0, k_bound(delta))


def regular_representation(delta: RingMatrix) -> np.ndarray:
    """Left-multiplication action of a matrix over a finite group algebra.

    Block (k, l) of the result is the |G| x |G| matrix of left multiplication
    by entry (k, l) in the basis ``group.elements()``; the full matrix has
    size ``rows * |G|``.  Real float64 when every coefficient is real,
    complex128 otherwise.
    """
    group = delta.group
    if not group.is_finite:
        raise InfiniteGroup(f"regular representation needs a finite group, got {group}")
    elems = group.elements()
    n = len(elems)
    index = {g: i for i, g in enumerate(elems)}
    real = all(e.is_real() for row in delta.entries for e in row)
    dtype = np.float64 if real else np.complex128
    h = np.zeros((delta.rows * n, delta.cols * n), dtype=dtype)
    mul = group.multiply
    for k in range(delta.rows):
        for l in range(delta.cols):
            for g, c in delta.entries[k][l].terms.items():
                cval = float(c.re) if real else complex(c)
                for v, gv in enumerate(elems):
                    h[k * n + index[mul(g, gv)], l * n + v] += cval
    return h


def _require_hermitian(h: np.ndarray, tol: float) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"matrix of shape {h.shape} is not square")
    scale = max(1.0, float(np.abs(h).max()) if h.size else 0.0)
    dev = float(np.abs(h - h.conj().T).max()) if h.size else 0.0
    if dev > tol * scale:
        raise NotHermitian(f"deviation from Hermitian symmetry {dev:.3e} exceeds {tol * scale:.3e}")
    return (h + h.conj().T) / 2


def hermitian_eigenvalues(h: np.ndarray, tol: float = DEFAULT_EIG_TOL) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending (LAPACK backend)."""
    h = _require_hermitian(h, tol)
    if h.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(h)


def jacobi_eigenvalues(h: np.ndarray, tol: float = DEFAULT_EIG_TOL, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi eigenvalues of a Hermitian matrix.

    Self-contained cross-check for the LAPACK backend; complex input is
    handled through the 2n real embedding [[Re, -Im], [Im, Re]], whose
    spectrum is that of the input with every eigenvalue doubled.  Converges
    when the off-diagonal Frobenius norm drops below tol times the Frobenius
    norm of the input.  Intended for modest sizes (n up to a few hundred).
    """
    h = _require_hermitian(h, tol)
    if h.size == 0:
        return np.zeros(0)
    if np.iscomplexobj(h):
        a = np.block([[h.real, -h.imag], [h.imag, h.real]])
        w = jacobi_eigenvalues(a, tol=tol, max_sweeps=max_sweeps)
        return w[::2]
    a = np.array(h, dtype=np.float64)
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    if norm == 0.0 or n == 1:
        return np.sort(np.diag(a))
    threshold = tol * norm
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
    else:
        raise ArithmeticError(f"Jacobi sweep limit {max_sweeps} reached before convergence")
    return np.sort(np.diag(a))


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalue list of one finite level plus its trace normalization.

    The level trace of a spectral function f is sum(f(eigenvalues)) / denom,
    so denom is |G| for quotient levels, |X_m| for compressions, and the
    number of grid points for torus quadrature.
    """

    eigenvalues: np.ndarray
    denom: int
    kernel_threshold: float

    @property
    def d(self) -> int:
        return len(self.eigenvalues) // self.denom

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1]) if len(self.eigenvalues) else 0.0

    def moment(self, m: int) -> float:
        return float(np.sum(self.eigenvalues ** m)) / self.denom

    def trace_of(self, values: np.ndarray) -> float:
        """Normalized trace of a function given by its eigenvalue values."""
        return float(np.sum(values)) / self.denom


@dataclass(frozen=True)
class SpectralDensity:
    """Right-continuous step function F(lambda) = mass of spectrum in [0, lambda].

    Jumps are (position, integer count) pairs; every count carries mass
    1/denom, which keeps the total mass exactly d for d*denom eigenvalues.
    """

    jumps: tuple
    denom: int

    @property
    def total_mass(self) -> float:
        return sum(c for _, c in self.jumps) / self.denom

    def evaluate(self, lam: float) -> float:
        acc = 0
        for pos, count in self.jumps:
            if pos <= lam:
                acc += count
            else:
                break
        return acc / self.denom

    def jump_points(self) -> list:
        return [pos for pos, _ in self.jumps]

    def masses(self) -> list:
        return [count / self.denom for _, count in self.jumps]

    def rows(self) -> list:
        """(lambda, F(lambda)) pairs at the jump points, cumulative."""
        out = []
        acc = 0
        for pos, count in self.jumps:
            acc += count
            out.append((pos, acc / self.denom))
        return out


def density_from_eigs(e: EigenResult) -> SpectralDensity:
    """Cluster an eigenvalue list into spectral jumps.

    Eigenvalues within the kernel threshold of zero form a jump at exactly
    0; the rest merge whenever the gap to the running cluster is at most the
    threshold, and the cluster is placed at its mean.
    """
    w = np.sort(np.asarray(e.eigenvalues, dtype=np.float64))
    thr = e.kernel_threshold
    jumps = []
    below = int(np.searchsorted(w, -thr, side="left"))
    kernel = int(np.searchsorted(w, thr, side="right")) - below
    i = 0
    while i < below:
        # genuinely negative spectrum (non-positive input); cluster as usual
        j = i + 1
        while j < below and w[j] - w[j - 1] <= thr:
            j += 1
        jumps.append((float(np.mean(w[i:j])), j - i))
        i = j
    # eigenvalues within the threshold of zero are the kernel; A*A spectra
    # may round slightly negative
    if kernel:
        jumps.append((0.0, kernel))
    i = below + kernel
    while i < len(w):
        j = i + 1
        while j < len(w) and w[j] - w[j - 1] <= thr:
            j += 1
        jumps.append((float(np.mean(w[i:j])), j - i))
        i = j
    return SpectralDensity(tuple(jumps), e.denom)


def betti(f: SpectralDensity) -> float:
    """F(0): the normalized kernel dimension."""
    return f.evaluate(0.0)


def log_det(e: EigenResult) -> float:
    """Normalized sum of log of the eigenvalues above the kernel threshold.

    At a finite level this is always finite; an empty sum gives 0.
    """
    w = np.asarray(e.eigenvalues)
    positive = w[w > e.kernel_threshold]
    if len(positive) == 0:
        return 0.0
    return float(np.sum(np.log(positive))) / e.denom


def character_spectrum_available(group: Group) -> bool:
    return group.cyclic_factors() is not None


def character_spectrum(delta: RingMatrix) -> np.ndarray:
    """Eigenvalues of the regular representation via characters.

    For a finite product of cyclic groups the left regular representation
    block-diagonalizes over the character grid; each character contributes
    the d x d Hermitian value of the symbol there.  Spectrally identical to
    the dense path, at a fraction of the cost.
    """
    group = delta.group
    factors = group.cyclic_factors()
    if factors is None:
        raise MalformedGroup(f"{group} is not a product of cyclic groups")
    total = 1
    for n in factors:
        total *= n
    r = len(factors)
    if r:
        grids = np.meshgrid(*[np.arange(n) for n in factors], indexing="ij")
        kmesh = np.stack(grids, axis=-1).reshape(total, r).astype(np.float64)
    else:
        kmesh = np.zeros((1, 0))
    d = delta.rows
    symbol = np.zeros((total, d, d), dtype=np.complex128)
    for k in range(d):
        for l in range(d):
            for g, c in delta.entries[k][l].terms.items():
                exps = np.asarray(group.exponents(g), dtype=np.float64)
                phase = np.exp(
                    -2j * np.pi * (kmesh @ (exps / np.asarray(factors, dtype=np.float64)))
                ) if r else np.ones(1)
                symbol[:, k, l] += complex(c) * phase
    w = np.linalg.eigvalsh(symbol)
    return np.sort(w.ravel())


def finite_spectrum(
    delta: RingMatrix,
    kernel_threshold: Optional[float] = None,
    method: str = "auto",
    eig_tol: float = DEFAULT_EIG_TOL,
) -> EigenResult:
    """Spectrum of a self-adjoint matrix over a finite group.

    method: "dense" assembles the regular representation, "character" uses
    the cyclic-product shortcut, "auto" picks character when available.
    """
    group = delta.group
    if not group.is_finite:
        raise InfiniteGroup(f"finite_spectrum needs a finite group, got {group}")
    if kernel_threshold is None:
        kernel_threshold = default_kernel_threshold(delta)
    if method == "auto":
        method = "character" if character_spectrum_available(group) else "dense"
    if method == "character":
        w = character_spectrum(delta)
    elif method == "dense":
        w = hermitian_eigenvalues(regular_representation(delta), tol=eig_tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return EigenResult(np.asarray(w), group.order, kernel_threshold)


def densities_match(f1: SpectralDensity, f2: SpectralDensity, atol: float = 1e-9):
    """Compare two step functions up to jitter atol in jump positions.

    Walks both jump lists and merges clusters of jump positions closer than
    atol, then compares cumulative masses after each cluster.  Returns
    (matched, max_deviation).
    """
    events = sorted(
        [(pos, 0, count) for pos, count in f1.jumps]
        + [(pos, 1, count) for pos, count in f2.jumps]
    )
    acc = [0, 0]
    maxdev = 0.0
    i = 0
    while i < len(events):
        start = events[i][0]
        while i < len(events) and events[i][0] - start <= atol:
            _, which, count = events[i]
            acc[which] += count
            i += 1
        dev = abs(acc[0] / f1.denom - acc[1] / f2.denom)
        maxdev = max(maxdev, dev)
    maxdev = max(maxdev, abs(f1.total_mass - f2.total_mass))
    return maxdev <= atol * 10 + 1e-12, maxdev


def subgroup_invariance_check(
    delta_u: RingMatrix, embedding: Homomorphism, tol: float = 1e-9
):
    """Induce a matrix along a finite-group embedding and compare densities.

    The spectral density of a matrix over U and of the induced matrix over
    the ambient group agree; returns (ok, max deviation at jump points).
    """
    if embedding.source != delta_u.group:
        raise MalformedGroup("embedding source does not match the matrix group")
    if not embedding.source.is_finite or not embedding.target.is_finite:
        raise InfiniteGroup("subgroup invariance check needs finite groups")
    if not embedding.injective_on(embedding.source.elements()):
        raise MalformedGroup("the supplied homomorphism is not injective")
    thr = default_kernel_threshold(delta_u)
    delta_pi = delta_u.push_forward(embedding)
    f_u = density_from_eigs(finite_spectrum(delta_u, kernel_threshold=thr))
    f_pi = density_from_eigs(finite_spectrum(delta_pi, kernel_threshold=thr))
    return densities_match(f_u, f_pi, atol=tol)
