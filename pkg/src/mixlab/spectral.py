"""Spectral frame shared by every model.

All models in this package diagonalize their dissipation operator: the state
of a simulation is (or maps isometrically onto) a complex coefficient vector,
and Sobolev norms of every order are weighted l2 sums over the eigenvalues.
This module holds the frame itself — eigenvalue lists, weighted inner
products, the H^s scale, low-frequency projections and the fractional
Laplacian multiplier — with no model-specific logic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Spectrum",
    "Field",
    "InnerProduct",
    "sobolev_norm",
    "project_low",
    "fractional_symbol",
    "dual_norm_hminus",
]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a dissipation operator, sorted ascending.

    The list is a finite truncation of an unbounded spectrum; ``size``
    records the truncation. All eigenvalues must be strictly positive —
    a zero eigenvalue would make the dual norm infinite and signals a
    broken boundary or pole treatment upstream.
    """

    eigenvalues: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("spectrum must be a nonempty 1-d eigenvalue list")
        if lam[0] <= 0.0:
            raise ValueError("dissipation spectrum must be strictly positive")
        if np.any(np.diff(lam) < 0.0):
            raise ValueError("eigenvalues must be sorted ascending")
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    @property
    def lam_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lam_max(self) -> float:
        return float(self.eigenvalues[-1])


@dataclass(frozen=True)
class Field:
    """Coefficient vector of a scalar in one model's working basis.

    ``basis`` tags how the coefficients are indexed: ``"torus-fourier"``
    (numpy fft mode order), ``"torus-fourier-sorted"`` (modes ascending),
    ``"radial-grid"`` (cell-centered grid values), ``"hermite"`` (degree
    order) or ``"eigen"`` (eigenbasis of the dissipation operator).
    """

    coefficients: np.ndarray
    basis: str = "eigen"

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "coefficients", c)

    def __len__(self) -> int:
        return self.coefficients.size


def _coeffs(f) -> np.ndarray:
    """Accept a Field or a bare ndarray."""
    return np.asarray(getattr(f, "coefficients", f), dtype=complex)


@dataclass(frozen=True)
class InnerProduct:
    """Diagonal weighted inner product <f, g> = sum_j w_j f_j conj(g_j).

    ``kind`` is one of ``"flat"``, ``"weighted-radial"`` (midpoint
    quadrature weights r_j dr), ``"gibbs-weighted"`` (flat in normalized
    Hermite coordinates of the Gaussian-weighted space) or
    ``"kolmogorov-modified"`` (per-mode multiplier of the modified L2
    product; positive only under the model's wavenumber constraint).
    """

    kind: str
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0.0):
            raise ValueError(f"{self.kind} inner product is not positive definite")
        object.__setattr__(self, "weights", w)

    def inner(self, f, g) -> complex:
        cf, cg = _coeffs(f), _coeffs(g)
        return complex(np.sum(self.weights * cf * np.conj(cg)))

    def norm(self, f) -> float:
        cf = _coeffs(f)
        return float(np.sqrt(np.sum(self.weights * np.abs(cf) ** 2)))


def sobolev_norm(f, spectrum: Spectrum, s: float) -> float:
    """H^s norm of a field expressed in the eigenbasis of ``spectrum``.

    Computes ``(sum_j lam_j^s |f_j|^2)^(1/2)``.  ``s = 0`` recovers the
    working-space norm, ``s = 1`` the dissipation form, negative ``s``
    the mixing (dual) scale.

    Parameters
    ----------
    f : Field or ndarray
        Coefficients in the eigenbasis, same length as the spectrum.
    spectrum : Spectrum
    s : float
        Any real Sobolev order.
    """
    c = _coeffs(f)
    lam = spectrum.eigenvalues
    if c.size != lam.size:
        raise ValueError(
            f"field has {c.size} coefficients but spectrum has {lam.size} eigenvalues"
        )
    if s == 0.0:
        return float(np.linalg.norm(c))
    return float(np.sqrt(np.sum(lam**s * np.abs(c) ** 2)))


def project_low(f, spectrum: Spectrum, R: float):
    """Low-frequency projection: zero every coefficient with eigenvalue > R.

    Idempotent by construction.  R below the smallest eigenvalue gives the
    zero field.  The projection satisfies the two-sided frequency-splitting
    inequalities

        ||P_R f||_H^2 <= R^s ||f||_{H^-s}^2,
        R^s ||(I - P_R) f||_H^2 <= ||f||_{H^s}^2,  s >= 0,

    which the test suite checks on random fields.
    """
    c = _coeffs(f).copy()
    lam = spectrum.eigenvalues
    if c.size != lam.size:
        raise ValueError(
            f"field has {c.size} coefficients but spectrum has {lam.size} eigenvalues"
        )
    c[lam > R] = 0.0
    if isinstance(f, Field):
        return Field(c, f.basis)
    return c


def fractional_symbol(gamma: float, k, m):
    """Fourier multiplier of the fractional Laplacian on the torus.

    Returns ``(k^2 + m^2)^(gamma/2)`` for mode (k, m); ``gamma = 2``
    reproduces the Laplacian symbol.  Multipliers compose additively in
    gamma.  Accepts scalars or arrays for k and m.
    """
    if not 0.0 < gamma <= 2.0:
        raise ValueError(f"diffusion order gamma must lie in (0, 2], got {gamma}")
    k = np.asarray(k, dtype=float)
    m = np.asarray(m, dtype=float)
    out = (k * k + m * m) ** (gamma / 2.0)
    if out.ndim == 0:
        return float(out)
    return out


def dual_norm_hminus(f, spectrum: Spectrum) -> float:
    """Mixing norm: the dual of the dissipation form.

    Equals ``||A^{-1/2} f||_H``, which in the discrete setting coincides
    exactly with the variational definition
    ``sup_eta |<f, eta>_H| / ||eta||_{H^1}`` (the supremum is attained at
    ``eta = A^{-1} f``).  The small-dimension test suite checks that
    equivalence against an independently computed supremum.
    """
    if spectrum.lam_min <= 0.0:
        raise ValueError("singular dissipation operator: zero eigenvalue in spectrum")
    return sobolev_norm(f, spectrum, -1.0)
