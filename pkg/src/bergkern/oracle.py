"""Independent checks for the monomial norms: Monte Carlo integration over the
defining inequalities, the Beta-type integral and a 1-D radial quadrature."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .bergman import KernelParams, MultiIndex
from .errors import DomainError
from .exactpoly import RatLike, as_rat
from .omega import OmegaMultiIndex, OmegaParams
from .specfun import log_gamma


@dataclass(frozen=True)
class McConfig:
    samples: int = 10**6
    seed: int = 0
    batch: int = 10_000  # samples per batch; batch means give the standard error

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("samples must be >= 1000")
        if self.batch < 1:
            raise ValueError("batch must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    accepted_fraction: float

    def within(self, reference: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - reference) <= sigmas * self.std_error


@dataclass(frozen=True)
class DnQR:
    params: KernelParams


@dataclass(frozen=True)
class DInv:
    n: int
    q: RatLike
    r: RatLike


@dataclass(frozen=True)
class Omega:
    params: OmegaParams


McDomain = Union[DnQR, DInv, Omega]


def _batch_stream(seed: int, b: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, b]))


def _batch_values(domain: McDomain, idx, m: int, seed: int, b: int):
    """Integrand times indicator for m draws; moduli of uniform points of the unit disk."""
    rng = _batch_stream(seed, b)
    if isinstance(domain, DnQR):
        p = domain.params
        rho = np.sqrt(rng.random((m, p.n + 2)))
        z, w1, w2 = rho[:, : p.n], rho[:, p.n], rho[:, p.n + 1]
        zz = (z**2).sum(axis=1)
        inside = (zz + w1 ** float(p.q) < 1) & (zz + w2 ** float(p.r) < 1)
        f = np.prod(z ** (2 * np.asarray(idx.alpha)), axis=1) * w1 ** (2 * idx.gamma1) * w2 ** (2 * idx.gamma2)
        dims = p.n + 2
    elif isinstance(domain, DInv):
        rho = np.sqrt(rng.random((m, 3)))
        z, w1, w2 = rho[:, 0], rho[:, 1], rho[:, 2]
        zn = z ** (2 / domain.n)
        inside = (zn + w1 ** float(as_rat(domain.q)) < 1) & (zn + w2 ** float(as_rat(domain.r)) < 1)
        f = z ** (2 * idx.alpha[0]) * w1 ** (2 * idx.gamma1) * w2 ** (2 * idx.gamma2)
        dims = 3
    elif isinstance(domain, Omega):
        p = domain.params
        rho = np.sqrt(rng.random((m, p.n + 1)))
        z, w = rho[:, 0], rho[:, 1:]
        inside = np.all(z[:, None] ** 2 + w**p.r < 1, axis=1)
        f = z ** (2 * idx.alpha) * np.prod(w ** (2 * np.asarray(idx.beta)), axis=1)
        dims = p.n + 1
    else:
        raise TypeError(f"unknown domain family {type(domain).__name__}")
    vals = math.pi**dims * np.where(inside, f, 0.0)
    return float(vals.sum()), int(inside.sum())


def mc_norm(domain: McDomain, idx, cfg: McConfig = McConfig(), workers: int = 1) -> McEstimate:
    """Rejection-sampling estimate of the squared norm of a monomial.

    Samples the unit polydisk enclosing the domain. Batches are independent,
    counter-indexed streams, combined in batch order, so the result is
    bit-identical for any ``workers``.
    """
    n_batches = max(2, -(-cfg.samples // cfg.batch))
    sizes = [len(c) for c in np.array_split(np.empty(cfg.samples), n_batches)]

    def run(b):
        return _batch_values(domain, idx, sizes[b], cfg.seed, b)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(n_batches)))
    else:
        results = [run(b) for b in range(n_batches)]
    sums = np.array([s for s, _ in results])
    accepted = sum(a for _, a in results)
    means = sums / np.array(sizes)
    mean = float(sums.sum() / cfg.samples)
    std_error = float(means.std(ddof=1) / math.sqrt(n_batches))
    return McEstimate(mean, std_error, accepted / cfg.samples)


def beta_integral(a: float, p: float, b: float) -> float:
    """int_0^1 x^a (1 - x^p)^b dx = Gamma((a+1)/p) Gamma(b+1) / (p Gamma((a+1)/p + b + 1))."""
    if not (a > -1 and b > -1 and p > 0):
        raise DomainError(f"need a > -1, b > -1, p > 0; got a={a}, p={p}, b={b}")
    s = (a + 1) / p
    return math.exp(log_gamma(s) + log_gamma(b + 1) - log_gamma(s + b + 1)) / p


def _radial_prefactor(params: KernelParams, idx: MultiIndex) -> tuple[float, int, float]:
    n = params.n
    # beta(alpha + 1) = prod Gamma(alpha_i + 1) / Gamma(|alpha| + n)
    log_beta = sum(log_gamma(a + 1) for a in idx.alpha) - log_gamma(idx.abs_alpha + n)
    pref = (2 * math.pi) ** (n + 2) * math.exp(log_beta) / (2 ** (n + 1) * (idx.gamma1 + 1) * (idx.gamma2 + 1))
    E = float((2 * idx.gamma1 + 2) / params.q + (2 * idx.gamma2 + 2) / params.r)
    return pref, 2 * idx.abs_alpha + 2 * n - 1, E


def beta_norm_D(params: KernelParams, idx: MultiIndex) -> float:
    """Squared norm over D_n^{q,r} via the Beta-integral closed form of the radial integral."""
    pref, a, E = _radial_prefactor(params, idx)
    return pref * beta_integral(a, 2, E)


def _gauss_legendre(f, lo: float, hi: float, nodes: np.ndarray, weights: np.ndarray) -> float:
    half = (hi - lo) / 2
    return float(half * np.dot(weights, f(lo + half * (nodes + 1))))


def adaptive_gauss_legendre(f, lo: float, hi: float, points: int = 32, rtol: float = 1e-14, max_depth: int = 60) -> float:
    """Adaptive bisection with a ``points``-node Gauss-Legendre rule per panel."""
    nodes, weights = np.polynomial.legendre.leggauss(points)
    whole = _gauss_legendre(f, lo, hi, nodes, weights)
    total = 0.0
    stack = [(lo, hi, whole, 0)]
    scale = abs(whole)
    while stack:
        a, b, est, depth = stack.pop()
        mid = (a + b) / 2
        left = _gauss_legendre(f, a, mid, nodes, weights)
        right = _gauss_legendre(f, mid, b, nodes, weights)
        refined = left + right
        if abs(refined - est) <= rtol * max(scale, 1e-300) * (b - a) / (hi - lo) or depth >= max_depth:
            total += refined
        else:
            stack.append((a, mid, left, depth + 1))
            stack.append((mid, b, right, depth + 1))
    return total


def radial_norm_quadrature(params: KernelParams, idx: MultiIndex, points: int = 32) -> float:
    """Squared norm over D_n^{q,r} from the reduced radial integral

    (2 pi)^{n+2} beta(alpha+1) / (2^{n+1} (g1+1)(g2+1)) int_0^1 rho^{2|alpha|+2n-1} (1-rho^2)^E d rho,

    evaluated as (1/2) int_0^1 u^{|alpha|+n-1} (1-u)^E du after u = rho^2.
    """
    if points < 32:
        raise ValueError("points must be >= 32")
    if len(idx.alpha) != params.n:
        raise ValueError("alpha length must equal n")
    pref, _, E = _radial_prefactor(params, idx)
    k = idx.abs_alpha + params.n - 1
    integral = adaptive_gauss_legendre(lambda u: u**k * (1 - u) ** E, 0.0, 1.0, points)
    return pref * integral / 2
