"""Kernels of Omega_n^r = {(z, w) in C x C^n : |z|^2 + |w_j|^r < 1 for all j}
on the slice z = 0, with a plain-series oracle and the zero-freeness check."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DomainError
from .specfun import DEFAULT_SERIES, SeriesConfig, log_gamma


@dataclass(frozen=True)
class OmegaParams:
    n: int
    r: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        object.__setattr__(self, "r", float(self.r))


@dataclass(frozen=True)
class OmegaMultiIndex:
    alpha: int
    beta: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(self.beta))
        if self.alpha < 0 or any(b < 0 for b in self.beta):
            raise ValueError("multi-index entries must be nonnegative")

    @classmethod
    def zero(cls, n: int) -> OmegaMultiIndex:
        return cls(0, (0,) * n)


def _nus(p: OmegaParams, nu: Sequence[complex]) -> list[complex]:
    nu = [complex(v) for v in nu]
    if len(nu) != p.n:
        raise ValueError(f"expected {p.n} products nu_k, got {len(nu)}")
    for v in nu:
        if abs(v) >= 1:
            raise DomainError(f"need |nu_k| < 1, got {abs(v)}")
    return nu


def norm_omega(p: OmegaParams, idx: OmegaMultiIndex) -> float:
    """Squared L^2 norm of z^alpha w^beta over Omega_n^r."""
    if len(idx.beta) != p.n:
        raise ValueError(f"beta has length {len(idx.beta)}, expected n = {p.n}")
    B = 2 / p.r * (sum(idx.beta) + p.n)
    log_val = (
        (p.n + 1) * math.log(math.pi)
        + log_gamma(B + 1)
        + log_gamma(idx.alpha + 1)
        - log_gamma(B + idx.alpha + 2)
        - sum(math.log(b + 1) for b in idx.beta)
    )
    return math.exp(log_val)


def kernel_omega(p: OmegaParams, nu: Sequence[complex]) -> complex:
    """K((0, w), (0, zeta)) = [prod (1-nu_k)^-2 + sum_k 2(1+nu_k)/(r prod(1-nu_j)^2 (1-nu_k))] / pi^{n+1}."""
    nu = _nus(p, nu)
    prod_sq = 1 + 0j
    for v in nu:
        prod_sq *= (1 - v) ** 2
    total = 1 / prod_sq + sum(2 * (1 + v) / (p.r * prod_sq * (1 - v)) for v in nu)
    return total / math.pi ** (p.n + 1)


def kernel_omega_diag(p: OmegaParams, nu: complex) -> complex:
    """Equal products nu_k = nu: ((2n - r) nu + 2n + r) / (r (1-nu)^{2n+1} pi^{n+1})."""
    nu = _nus(OmegaParams(1, p.r), [nu])[0]
    n, r = p.n, p.r
    return ((2 * n - r) * nu + 2 * n + r) / (r * (1 - nu) ** (2 * n + 1) * math.pi ** (n + 1))


def omega_series(p: OmegaParams, nu: Sequence[complex], cfg: SeriesConfig = DEFAULT_SERIES) -> complex:
    """Plain multi-series sum over beta of (2/r)(|beta| + n + r/2) prod(beta_j + 1) nu^beta.

    Summed by total degree s = |beta|: the inner sum over |beta| = s of
    prod (beta_j + 1) nu_j^beta_j is the s-th coefficient of the product of
    the per-coordinate sequences, computed by discrete convolution.
    """
    nu = _nus(p, nu)
    r, n = p.r, p.n
    width = 64
    while True:
        if width > cfg.max_terms:
            raise ConvergenceError(f"Omega series did not converge within {cfg.max_terms} degrees")
        k = np.arange(width)
        conv = np.ones(1, dtype=complex)
        conv_abs = np.ones(1)
        for v in nu:
            seq = (k + 1) * np.power(v, k)
            conv = np.convolve(conv, seq)[:width]
            conv_abs = np.convolve(conv_abs, np.abs(seq))[:width]
        s = np.arange(width)
        weight = 2 / r * (s + n + r / 2)
        diag = weight * conv
        diag_abs = weight * conv_abs
        acc = np.cumsum(diag_abs)
        ok = np.nonzero((diag_abs[1:] <= cfg.rel_tail_tol * acc[1:]) & (diag_abs[1:] <= diag_abs[:-1]))[0]
        if ok.size:
            stop = ok[0] + 1
            return complex(diag[: stop + 1].sum()) / math.pi ** (n + 1)
        width *= 2


@dataclass(frozen=True)
class ZeroFreeReport:
    n: int
    r: float
    samples: int
    seed: int
    min_term: float  # min over samples and k of Re(2 nu_k / (1 - nu_k))
    min_value: float  # min over samples of Re(n + r/2 + sum_k 2 nu_k/(1 - nu_k))

    @property
    def passed(self) -> bool:
        return self.min_term > -1 and self.min_value > 0


def omega_zero_free_check(p: OmegaParams, samples: int, seed: int, batch: int = 65536) -> ZeroFreeReport:
    """Sample the open polydisk and record the two inequalities behind zero-freeness.

    Batch b draws from a Philox stream keyed by ``seed`` with its counter
    offset by b, so the result does not depend on how batches are scheduled.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    min_term = math.inf
    min_value = math.inf
    done = 0
    b = 0
    while done < samples:
        m = min(batch, samples - done)
        rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, b]))
        rad = np.sqrt(rng.random((m, p.n)))
        ang = 2 * math.pi * rng.random((m, p.n))
        nu = rad * np.exp(1j * ang)
        terms = (2 * nu / (1 - nu)).real
        min_term = min(min_term, float(terms.min()))
        min_value = min(min_value, float((p.n + p.r / 2 + terms.sum(axis=1)).min()))
        done += m
        b += 1
    return ZeroFreeReport(p.n, p.r, samples, seed, min_term, min_value)
