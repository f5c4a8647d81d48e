"""Concrete model problems: shear, Kolmogorov, spiral and kinetic flows.

Each builder assembles a :class:`ModelProblem` — the dissipation operator A,
the advection operator B, the working inner product, and the model's
predicted exponents — in a representation chosen so that the structural
identities hold *exactly* in floating point:

* B is skew-adjoint in the working product by construction (unimodular
  phases, or matrices that are antisymmetric after symmetrization), so the
  inviscid flow is an isometry;
* A is self-adjoint and strictly positive (diagonal multipliers on the
  torus and in the Hermite basis; a symmetrized tridiagonal with a no-flux
  boundary on the disk), so the Sobolev scale and the dual mixing norm are
  well-defined.

State conventions
-----------------
shear        Fourier coefficients of the retained x-mode, numpy fft order,
             ``norm="forward"`` convention (coefficient c_m multiplies
             e^{imy}); flat inner product.
kolmogorov   Fourier coefficients in *sorted* mode order m = -M..M-1;
             weighted product with per-mode multiplier s_m = 1 - 1/(L^2k^2+m^2).
spiral       values on the cell-centered radial grid r_j = (j-1/2)/N;
             midpoint-quadrature product with weights r_j dr.
kinetic      coefficients on normalized Hermite modes of total degree
             1..N (degree 0 carries no dynamics and is excluded to keep A
             strictly positive); flat product in these coordinates.
"""

from __future__ import annotations

import csv as _csv
from dataclasses import dataclass, field
from itertools import product as _iproduct
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal, solveh_banded

from .spectral import Field, InnerProduct, Spectrum, fractional_symbol

__all__ = [
    "ShearModel",
    "KolmogorovModel",
    "SpiralModel",
    "KineticModel",
    "ModelProblem",
    "PROFILES",
    "load_profile_csv",
    "build_shear",
    "build_kolmogorov",
    "build_spiral",
    "build_kinetic",
    "build_model",
    "exact_inviscid",
    "predicted_rates",
    "initial_datum",
]


# ---------------------------------------------------------------------------
# shear profiles

def _sin2(y):
    return np.sin(y) + np.sin(2.0 * y)


def _dsin2(y):
    return np.cos(y) + 2.0 * np.cos(2.0 * y)


#: name -> (u, u', maximal vanishing order n0 of u' at its critical points).
#: n0 is declared, not detected: the vanishing order of a closure is not
#: robustly computable from grid samples.
PROFILES: dict[str, tuple[Callable, Callable, int | None]] = {
    "sin": (np.sin, np.cos, 1),
    "sin2": (_sin2, _dsin2, 1),
    "zero": (lambda y: np.zeros_like(y), lambda y: np.zeros_like(y), None),
}


def load_profile_csv(path) -> tuple[Callable, Callable, None]:
    """Load a tabulated shear profile from a CSV with columns ``y, u``.

    The table is interpolated linearly and extended 2*pi-periodically; the
    derivative is a finite difference of the table (adequate for the
    advection bound and the commutator constant, which only need max|u'|).
    The vanishing order n0 cannot be inferred from a table and must be
    supplied by the caller.
    """
    ys, us = [], []
    with open(path, newline="") as fh:
        for row in _csv.reader(fh):
            if not row or row[0].strip().lower() in ("y", ""):
                continue
            ys.append(float(row[0]))
            us.append(float(row[1]))
    ys = np.asarray(ys)
    us = np.asarray(us)
    order = np.argsort(ys)
    ys, us = ys[order], us[order]

    def u(y):
        yy = np.mod(y, 2.0 * np.pi)
        return np.interp(yy, ys, us, period=2.0 * np.pi)

    def uprime(y):
        eps = 1e-6
        return (u(np.asarray(y) + eps) - u(np.asarray(y) - eps)) / (2.0 * eps)

    return u, uprime, None


# ---------------------------------------------------------------------------
# model descriptors

@dataclass(frozen=True)
class ShearModel:
    """Shear flow u(y) acting on one x-wavenumber, fractional diffusion."""

    profile: str = "sin"
    gamma: float = 2.0
    k: int = 1
    n0: int | None = None  # None: take the registry value for the profile
    M: int = 512


@dataclass(frozen=True)
class KolmogorovModel:
    """Linearized sinusoidal shear with its nonlocal vorticity correction."""

    L: float = 2.0
    k: int = 1
    M: int = 512


@dataclass(frozen=True)
class SpiralModel:
    """Radially stationary swirl with angular phase speed r^alpha on the disk."""

    alpha: float = 1.0
    k: int = 1
    N: int = 256


@dataclass(frozen=True)
class KineticModel:
    """Free transport at spatial frequency k against an Ornstein-Uhlenbeck
    velocity equilibrium, truncated at Hermite degree N."""

    k: int | tuple = 1
    N: int = 64
    d: int = 1


@dataclass(frozen=True)
class ModelProblem:
    """A built model: operators, inner product, constants, predictions.

    ``kind`` selects the advection realization used by the integrator:
    ``"phase"`` (B is multiplication by -i * phase_rate in the physical
    representation; exact unimodular step) or ``"matrix"`` (B is a dense
    skew generator in symmetrized coordinates; exact matrix exponential).
    """

    name: str
    params: dict
    kind: str
    inner: InnerProduct
    spectrum: Spectrum
    k: int
    c_B: float
    bound_B: float  # advection strength bound used by the time-step policy
    mixed_bound: float | None  # improved |Re<Bf, Af>| <= C ||f||_H ||f||_H1
    p: float | None  # predicted mixing exponent
    q: float | None  # predicted enhanced-dissipation exponent
    alt_q: float | None = None  # alternative prediction where one exists
    exact_inviscid: bool = False
    # --- operator data (representation-dependent) ---
    a_diag: np.ndarray | None = None  # diagonal of A in the state basis
    phase_rate: np.ndarray | None = None  # B = -i*phase_rate (phase kind)
    b_sym: np.ndarray | None = None  # skew generator, symmetrized (matrix kind)
    eig_vals: np.ndarray | None = None  # spiral: eigenvalues of symmetrized A
    eig_vecs: np.ndarray | None = None  # spiral: orthonormal eigenvectors
    basis: str = "eigen"
    grid: np.ndarray | None = None  # y- or r-grid where meaningful
    meta: dict = field(default_factory=dict)

    # -- coordinates ------------------------------------------------------

    def symmetrized(self, state) -> np.ndarray:
        """Map a state to coordinates in which the inner product is flat."""
        c = np.asarray(getattr(state, "coefficients", state), dtype=complex)
        return np.sqrt(self.inner.weights) * c

    def eigen_coords(self, state) -> np.ndarray:
        """Coefficients in the (ascending) eigenbasis of A."""
        g = self.symmetrized(state)
        if self.eig_vecs is not None:
            return self.eig_vecs.T @ g
        return g[self.meta["eig_perm"]]

    def sobolev(self, state, s: float) -> float:
        """H^s norm of a state (s = 0: working norm, s = -1: mixing norm)."""
        g = self.symmetrized(state)
        if self.eig_vecs is not None:
            c = self.eig_vecs.T @ g
            lam = self.eig_vals
        else:
            c = g
            lam = self.a_diag
        if s == 0.0:
            return float(np.linalg.norm(c))
        return float(np.sqrt(np.sum(lam**s * np.abs(c) ** 2)))

    def apply_B(self, state) -> np.ndarray:
        """Advection operator acting on a state vector."""
        c = np.asarray(getattr(state, "coefficients", state), dtype=complex)
        if self.kind == "phase":
            if self.basis == "torus-fourier":
                vals = np.fft.ifft(c, norm="forward")
                return np.fft.fft(1j * self.phase_rate * vals, norm="forward")
            return 1j * self.phase_rate * c
        g = self.symmetrized(c)
        return (self.b_sym @ g) / np.sqrt(self.inner.weights)

    def apply_A(self, state) -> np.ndarray:
        c = np.asarray(getattr(state, "coefficients", state), dtype=complex)
        if self.a_diag is not None:
            return self.a_diag * c
        g = self.symmetrized(c)
        ag = self.eig_vecs @ (self.eig_vals * (self.eig_vecs.T @ g))
        return ag / np.sqrt(self.inner.weights)

    @property
    def size(self) -> int:
        return self.inner.weights.size

    @property
    def lam1(self) -> float:
        return self.spectrum.lam_min

    def field(self, coeffs) -> Field:
        return Field(np.asarray(coeffs, dtype=complex), self.basis)


# ---------------------------------------------------------------------------
# builders

def build_shear(m: ShearModel) -> ModelProblem:
    """Shear flow on the torus, one x-wavenumber, fractional diffusion.

    A is the diagonal multiplier (k^2 + m^2)^(gamma/2); B is multiplication
    by i*k*u(y), an exact unimodular phase in physical space. The
    advection-diffusion commutator constant is c_B = max|u'| (for the
    Laplacian case; for fractional orders the same quantity is recorded as
    the natural strength scale). The predicted mixing exponent on this
    model's own dual scale is p = gamma / (2 (n0 + 1)) and the
    enhanced-dissipation prediction is q = 2 / (2 + p).
    """
    if m.k == 0:
        raise ValueError("shear model requires a nonzero x-wavenumber k")
    if not 0.0 < m.gamma <= 2.0:
        raise ValueError(f"diffusion order gamma must lie in (0, 2], got {m.gamma}")
    if callable(m.profile):
        u_fn, du_fn, n0_default = m.profile, None, None
    else:
        try:
            u_fn, du_fn, n0_default = PROFILES[m.profile]
        except KeyError:
            raise ValueError(
                f"unknown shear profile {m.profile!r}; "
                f"registered: {sorted(PROFILES)}"
            ) from None
    n0 = m.n0 if m.n0 is not None else n0_default

    n = 2 * m.M
    y = 2.0 * np.pi * np.arange(n) / n
    modes = np.fft.fftfreq(n, d=1.0 / n)
    lam = fractional_symbol(m.gamma, m.k, modes)
    u = np.asarray(u_fn(y), dtype=float)
    if du_fn is not None:
        du = np.asarray(du_fn(y), dtype=float)
    else:
        # spectral derivative of the sampled profile
        du = np.real(np.fft.ifft(1j * modes * np.fft.fft(u)))
    max_du = float(np.max(np.abs(du)))
    max_u = float(np.max(np.abs(u)))

    zero_profile = max_u == 0.0
    if zero_profile:
        p = None
        q = 1.0  # plain diffusive scale: no enhancement to predict
    elif n0 is None:
        p = q = None
    else:
        p = m.gamma / (2.0 * (n0 + 1))
        q = 2.0 / (2.0 + p)

    perm = np.argsort(lam, kind="stable")
    params = {
        "profile": m.profile if isinstance(m.profile, str) else "custom",
        "gamma": m.gamma,
        "k": m.k,
        "n0": n0,
        "M": m.M,
    }
    return ModelProblem(
        name="shear",
        params=params,
        kind="phase",
        inner=InnerProduct("flat", np.ones(n)),
        spectrum=Spectrum(lam[perm]),
        k=m.k,
        c_B=max_du,
        bound_B=abs(m.k) * max_u,
        mixed_bound=None,
        p=p,
        q=q,
        exact_inviscid=True,
        a_diag=lam,
        phase_rate=m.k * u,
        basis="torus-fourier",
        grid=y,
        meta={"eig_perm": perm, "modes": modes, "u": u, "max_du": max_du},
    )


def build_kolmogorov(m: KolmogorovModel) -> ModelProblem:
    """Linearized sinusoidal shear on an L-aspect torus.

    The advecting operator carries the nonlocal vorticity correction: on
    mode m it couples to m +- 1 with entries (kL/2) s_{m-+1}, where
    s_m = 1 - 1/(L^2 k^2 + m^2) is also the per-mode multiplier of the
    working inner product. The product is positive definite only under the
    wavenumber constraint |k| >= 2 on the square torus (|k| >= 1 for
    L > 1): at L = 1, |k| = 1 the m = 0 multiplier vanishes.

    B is exactly skew in the weighted product, including at the mode-space
    truncation (the dropped couplings are the boundary pair); after
    symmetrization it is a real antisymmetric tridiagonal matrix.
    """
    if m.L < 1.0:
        raise ValueError(f"aspect ratio L must be >= 1, got {m.L}")
    if m.k == 0:
        raise ValueError("kolmogorov model requires a nonzero x-wavenumber k")
    if m.L == 1.0 and abs(m.k) < 2:
        raise ValueError(
            "wavenumber constraint violated: on the square torus (L = 1) the "
            "working inner product degenerates for |k| = 1; use |k| >= 2"
        )

    n = 2 * m.M
    modes = np.arange(-m.M, m.M, dtype=float)  # sorted layout
    mu = m.L**2 * m.k**2 + modes**2
    s = 1.0 - 1.0 / mu
    kL = m.k * m.L

    # symmetrized advection generator: antisymmetric real tridiagonal with
    # sub-diagonal (kL/2) sqrt(s_m s_{m-1}) on row m
    off = 0.5 * kL * np.sqrt(s[1:] * s[:-1])
    b_sym = np.zeros((n, n))
    idx = np.arange(n - 1)
    b_sym[idx + 1, idx] = off
    b_sym[idx, idx + 1] = -off

    perm = np.argsort(mu, kind="stable")
    params = {"L": m.L, "k": m.k, "M": m.M}
    return ModelProblem(
        name="kolmogorov",
        params=params,
        kind="matrix",
        inner=InnerProduct("kolmogorov-modified", s),
        spectrum=Spectrum(mu[perm]),
        k=m.k,
        c_B=abs(kL) / np.sqrt(mu.min()),  # = 1 exactly for every valid (L, k)
        bound_B=abs(kL),
        mixed_bound=None,
        p=1.0,
        q=2.0 / 3.0,
        alt_q=3.0 / 5.0,
        exact_inviscid=False,
        a_diag=mu,
        b_sym=b_sym,
        basis="torus-fourier-sorted",
        meta={"eig_perm": perm, "modes": modes},
    )


def _disk_operator(N: int, k: int):
    """Symmetrized radial operator -Lap_k on the cell-centered disk grid.

    Conservative flux form with a zero flux through both the pole face
    (automatic: the r = 0 face has zero measure) and the outer boundary,
    which makes the matrix exactly self-adjoint in the midpoint quadrature
    and strictly positive for k != 0.
    """
    dr = 1.0 / N
    r = (np.arange(1, N + 1) - 0.5) * dr
    re = np.arange(1, N) * dr  # interior cell edges r_{j+1/2}
    flux = np.zeros(N + 1)
    flux[1:-1] = re
    diag = (flux[:-1] + flux[1:]) / (r * dr * dr) + k * k / (r * r)
    off = -re / (dr * dr * np.sqrt(r[:-1] * r[1:]))
    return r, dr, diag, off


def build_spiral(m: SpiralModel) -> ModelProblem:
    """Swirling flow on the unit disk, angular wavenumber k.

    B is multiplication by i k r^alpha — an exact diagonal phase on the
    radial grid. A is the radial operator with a no-flux outer boundary,
    diagonalized once per (N, k); its eigendecomposition also provides the
    dual mixing norm. The improved advection-dissipation bound
    |Re<Bf, Af>| <= 2 alpha |k| ||f||_H ||f||_{H^1} is recorded for the
    sharpened constant in the decay-rate formulas.
    """
    if m.alpha < 1.0:
        raise ValueError(f"swirl exponent alpha must be >= 1, got {m.alpha}")
    if m.k == 0:
        raise ValueError("spiral model requires a nonzero angular wavenumber k")
    r, dr, diag, off = _disk_operator(m.N, m.k)
    lam, vecs = eigh_tridiagonal(diag, off)
    w = r * dr
    p_alpha = 2.0 / max(m.alpha, 2.0)
    q_alpha = (4.0 - p_alpha) / (4.0 + p_alpha)
    mixed = 2.0 * m.alpha * abs(m.k)
    params = {"alpha": m.alpha, "k": m.k, "N": m.N}
    return ModelProblem(
        name="spiral",
        params=params,
        kind="phase",
        inner=InnerProduct("weighted-radial", w),
        spectrum=Spectrum(lam),
        k=m.k,
        c_B=mixed / np.sqrt(lam[0]),
        bound_B=float(abs(m.k) * np.max(r**m.alpha)),
        mixed_bound=mixed,
        p=p_alpha,
        q=q_alpha,
        exact_inviscid=True,
        phase_rate=m.k * r**m.alpha,
        eig_vals=lam,
        eig_vecs=vecs,
        basis="radial-grid",
        grid=r,
        meta={},
    )


def _hermite_indices(N: int, d: int):
    """Multi-indices of total degree 1..N in d velocity dimensions."""
    idx = [n for n in _iproduct(range(N + 1), repeat=d) if 0 < sum(n) <= N]
    idx.sort(key=lambda n: (sum(n), n))
    return idx


def build_kinetic(m: KineticModel) -> ModelProblem:
    """Kinetic free transport against a Gaussian velocity equilibrium.

    In normalized Hermite coordinates of the Gaussian-weighted velocity
    space, A (the Ornstein-Uhlenbeck operator) is diagonal with eigenvalue
    equal to the total degree, and B = i v.k couples adjacent degrees
    through the ladder relation v_j h_n = sqrt(n_j+1) h_{n+e_j}
    + sqrt(n_j) h_{n-e_j}. The degree-0 mode is dynamically inert under
    diffusion and is excluded so A stays strictly positive; the coupling
    into it (and past the top degree N) is truncated, which preserves exact
    skewness. On this truncation |Re<Bf, Af>| <= |k| ||f||_H ||f||_{H^1}
    holds exactly, by one Cauchy-Schwarz on the surviving ladder sum.
    """
    if m.N < 2:
        raise ValueError("kinetic truncation degree N must be >= 2")
    kvec = np.atleast_1d(np.asarray(m.k, dtype=float))
    if kvec.size != m.d:
        if kvec.size == 1:
            kvec = np.concatenate([kvec, np.zeros(m.d - 1)])
        else:
            raise ValueError(f"frequency vector has {kvec.size} entries for d={m.d}")
    if not np.any(kvec):
        raise ValueError("kinetic model requires a nonzero spatial frequency")

    idx = _hermite_indices(m.N, m.d)
    pos = {n: i for i, n in enumerate(idx)}
    D = len(idx)
    degrees = np.array([sum(n) for n in idx], dtype=float)

    K = np.zeros((D, D))  # v.k in the normalized ladder basis (symmetric)
    for i, n in enumerate(idx):
        for j in range(m.d):
            if kvec[j] == 0.0:
                continue
            up = list(n)
            up[j] += 1
            other = pos.get(tuple(up))
            if other is not None:
                K[other, i] += kvec[j] * np.sqrt(n[j] + 1.0)
                K[i, other] += kvec[j] * np.sqrt(n[j] + 1.0)

    knorm = float(np.linalg.norm(kvec))
    params = {"k": m.k if np.isscalar(m.k) else tuple(kvec), "N": m.N, "d": m.d}
    return ModelProblem(
        name="kinetic",
        params=params,
        kind="matrix",
        inner=InnerProduct("gibbs-weighted", np.ones(D)),
        spectrum=Spectrum(np.sort(degrees)),
        k=int(kvec[0]) if m.d == 1 else 0,
        c_B=knorm,  # lam1 = 1, so the mixed bound doubles as the commutator bound
        bound_B=float(np.max(np.abs(np.linalg.eigvalsh(K)))),
        mixed_bound=knorm,
        p=None,
        q=None,
        exact_inviscid=False,
        a_diag=degrees,
        b_sym=1j * K,
        basis="hermite",
        meta={"eig_perm": np.argsort(degrees, kind="stable"), "indices": idx},
    )


_BUILDERS = {
    "shear": (ShearModel, build_shear),
    "kolmogorov": (KolmogorovModel, build_kolmogorov),
    "spiral": (SpiralModel, build_spiral),
    "kinetic": (KineticModel, build_kinetic),
}


def build_model(name: str, **params) -> ModelProblem:
    """Build a model by family name. ``"heat"`` is the zero-profile shear."""
    if name == "heat":
        params.setdefault("profile", "zero")
        name = "shear"
    try:
        cls, builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from "
                         f"{sorted(_BUILDERS) + ['heat']}") from None
    return builder(cls(**params))


# ---------------------------------------------------------------------------
# closed forms and predictions

def exact_inviscid(problem: ModelProblem, f_in, t: float):
    """Closed-form inviscid solution where the advection is a pure phase.

    For the shear and spiral models the inviscid flow is multiplication by
    ``exp(-i * phase_rate * t)`` in the physical representation, which
    preserves the working norm to machine precision. Models whose advection
    mixes modes (Kolmogorov, kinetic) have no closed form.
    """
    if not problem.exact_inviscid:
        raise ValueError(
            f"model {problem.name!r} has no closed-form inviscid solution"
        )
    c = np.asarray(getattr(f_in, "coefficients", f_in), dtype=complex)
    shift = np.exp(-1j * problem.phase_rate * t)
    if problem.basis == "torus-fourier":
        vals = np.fft.ifft(c, norm="forward")
        out = np.fft.fft(shift * vals, norm="forward")
    else:
        out = shift * c
    if isinstance(f_in, Field):
        return Field(out, f_in.basis)
    return out


def predicted_rates(problem: ModelProblem, a: float | None = None) -> dict:
    """Predicted exponents and decay constants for a built model.

    Returns a dict with keys ``p`` (mixing exponent on the model's dual
    scale), ``q`` (enhanced-dissipation exponent; time-scale nu^-q),
    ``alt_q`` (secondary prediction where noted), ``c_B``, ``log_power``
    (the |ln nu| power of the time-scale under exponential mixing, 2/p)
    and ``c0`` — the explicit decay constant, evaluated only when the
    mixing amplitude ``a`` is supplied (the theory treats it as given; in
    practice it is fitted from an inviscid run).
    """
    from .diagnostics import constant_c0_poly, constant_c0_spiral

    p, q = problem.p, problem.q
    out = {
        "p": p,
        "q": q,
        "alt_q": problem.alt_q,
        "c_B": problem.c_B,
        "log_power": (2.0 / p) if p else None,
        "c0": None,
    }
    if a is not None and p is not None:
        if problem.name == "spiral":
            out["c0"] = constant_c0_spiral(problem.params["alpha"], a)
        else:
            out["c0"] = constant_c0_poly(p, a, problem.c_B)
    return out


# ---------------------------------------------------------------------------
# initial data

def _normalize_h1(problem: ModelProblem, state: np.ndarray) -> np.ndarray:
    h1 = problem.sobolev(state, 1.0)
    if h1 == 0.0 or not np.isfinite(h1):
        raise ValueError("degenerate initial datum (zero or non-finite H^1 norm)")
    return state / h1


def initial_datum(problem: ModelProblem, name: str = "single-mode-m1",
                  seed: int | None = None) -> np.ndarray:
    """Named initial data, normalized to unit H^1 norm.

    ``"single-mode-m1"`` — lowest nontrivial mode: the m = 1 Fourier mode
    on the torus, the lowest radial eigenmode on the disk, the degree-1
    Hermite mode for the kinetic model.
    ``"uniform"`` — constant on the disk grid (a representative of the
    data class that saturates the mixing rate; disk only).
    ``"gaussian-bump"`` — a smooth bump (torus and disk).
    ``"random-h1"`` — seeded random coefficients with a smooth envelope.
    """
    n = problem.size
    if name in ("single-mode-m1", "single-mode m=1"):
        state = np.zeros(n, dtype=complex)
        if problem.basis == "torus-fourier":
            state[1] = 1.0  # fft layout: index 1 is mode m=1
        elif problem.basis == "torus-fourier-sorted":
            m1 = int(np.where(problem.meta["modes"] == 1.0)[0][0])
            state[m1] = 1.0
        elif problem.basis == "radial-grid":
            g = problem.eig_vecs[:, 0]
            state = (g / np.sqrt(problem.inner.weights)).astype(complex)
        else:  # hermite: lowest degree
            state[0] = 1.0
    elif name == "uniform":
        if problem.basis != "radial-grid":
            raise ValueError("uniform datum is defined on the disk only")
        state = np.ones(n, dtype=complex)
    elif name == "gaussian-bump":
        if problem.basis == "torus-fourier":
            y = problem.grid
            vals = np.exp(-((y - np.pi) ** 2) / 0.5)
            state = np.fft.fft(vals.astype(complex), norm="forward")
        elif problem.basis == "torus-fourier-sorted":
            modes = problem.meta["modes"]
            state = np.exp(-0.125 * modes**2 - 1j * np.pi * modes)
        elif problem.basis == "radial-grid":
            r = problem.grid
            state = np.exp(-((r - 0.5) ** 2) / 0.045).astype(complex)
        else:
            raise ValueError(
                f"gaussian-bump datum is not defined for basis {problem.basis!r}"
            )
    elif name == "random-h1":
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if problem.eig_vecs is not None:
            c /= 1.0 + problem.eig_vals
            g = problem.eig_vecs @ c
            state = g / np.sqrt(problem.inner.weights)
        else:
            state = c / (1.0 + problem.a_diag)
    else:
        raise ValueError(f"unknown initial datum {name!r}")
    return _normalize_h1(problem, state)


def shear_mixing_series(times, profile="sin", gamma=2.0, k=1, M=2048,
                        datum="single-mode-m1", seed=None):
    """Exact inviscid norm history for a shear flow, evaluated pointwise.

    Uses the closed-form solution f(t) = f_in * exp(-i k u(y) t) on a
    2M-point grid and returns the norms at the requested times without
    time stepping, so `times` may be log-spaced over several decades.
    Memory stays O(M): no operator matrices are formed.

    Parameters
    ----------
    times : array_like
        Evaluation times (any order, need not include 0).
    profile, gamma, k, M :
        As in `ShearModel`. M must comfortably exceed k * max|u| * max(times)
        so the phase-generated Fourier spread stays inside the truncation.
    datum : str
        "single-mode-m1", "gaussian-bump", or "random-h1".
    seed :
        Seed for the random datum.

    Returns
    -------
    dict with arrays "t", "h", "h1", "hm1" (unit initial H^1 norm).
    """
    if profile in PROFILES:
        u_fun = PROFILES[profile][0]
    else:
        u_fun = load_profile_csv(profile)[0]
    n = 2 * M
    y = 2.0 * np.pi * np.arange(n) / n
    u = u_fun(y)
    modes = np.fft.fftfreq(n, d=1.0 / n)
    lam = fractional_symbol(gamma, k, modes)
    c = np.zeros(n, dtype=complex)
    if datum in ("single-mode-m1", "single-mode m=1"):
        c[1] = 1.0
    elif datum == "gaussian-bump":
        vals = np.exp(-((y - np.pi) ** 2) / 0.5)
        c = np.fft.fft(vals.astype(complex), norm="forward")
    elif datum == "random-h1":
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c /= 1.0 + lam
    else:
        raise ValueError(f"unsupported datum {datum!r} for the exact shear series")
    c /= np.sqrt(np.sum(lam * np.abs(c) ** 2))
    vals0 = np.fft.ifft(c, norm="forward")
    times = np.asarray(times, dtype=float)
    h = np.empty_like(times)
    h1 = np.empty_like(times)
    hm1 = np.empty_like(times)
    for i, t in enumerate(times):
        ct = np.fft.fft(vals0 * np.exp(-1j * k * u * t), norm="forward")
        mag2 = np.abs(ct) ** 2
        h[i] = np.sqrt(mag2.sum())
        h1[i] = np.sqrt((lam * mag2).sum())
        hm1[i] = np.sqrt((mag2 / lam).sum())
    return {"t": times, "h": h, "h1": h1, "hm1": hm1}


def spiral_mixing_series(times, alpha=1.0, k=1, N=8192, datum="uniform",
                         seed=None):
    """Exact inviscid norm history for the swirling disk flow.

    The advection is a pure radial phase, so f(t) is evaluated in closed
    form; the dual norm comes from a banded solve with the symmetrized
    radial operator rather than its eigendecomposition, which keeps N in
    the thousands cheap (O(N) per time).

    Parameters / returns as in `shear_mixing_series`; `datum` may be
    "uniform", "single-mode-m1", or "gaussian-bump".
    """
    r, dr, diag, off = _disk_operator(N, k)
    w = r * dr
    sqw = np.sqrt(w)
    if datum == "uniform":
        f0 = np.ones(N, dtype=complex)
    elif datum in ("single-mode-m1", "single-mode m=1"):
        _, vec = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
        f0 = vec[:, 0].astype(complex) / sqw
    elif datum == "gaussian-bump":
        f0 = np.exp(-((r - 0.5) ** 2) / 0.045).astype(complex)
    else:
        raise ValueError(f"unsupported datum {datum!r} for the exact disk series")
    g0 = sqw * f0

    def a_apply(g):
        out = diag * g
        out[:-1] += off * g[1:]
        out[1:] += off * g[:-1]
        return out

    g0 /= np.sqrt(np.real(np.vdot(g0, a_apply(g0))))
    ab = np.zeros((2, N))
    ab[0, 1:] = off
    ab[1, :] = diag
    rate = k * r**alpha
    times = np.asarray(times, dtype=float)
    h = np.empty_like(times)
    h1 = np.empty_like(times)
    hm1 = np.empty_like(times)
    for i, t in enumerate(times):
        gt = g0 * np.exp(-1j * rate * t)
        h[i] = np.linalg.norm(gt)
        h1[i] = np.sqrt(np.real(np.vdot(gt, a_apply(gt))))
        x = solveh_banded(ab, gt)
        hm1[i] = np.sqrt(np.real(np.vdot(gt, x)))
    return {"t": times, "h": h, "h1": h1, "hm1": hm1}
