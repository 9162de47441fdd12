"""Discrete and continuous Riesz and logarithmic energies on the unit sphere.

Conventions
-----------
``E`` is the sum over ordered pairs ``i != j``.  For ``s > 0`` the kernel is
``|x - y|^{-s}``, for the logarithmic kernel ``log(1/|x - y|)`` and for
``s < 0`` the positive distance power ``|x - y|^{|s|}``, so that ``E / N^2``
tends to the (positive) continuous energy of the uniform measure.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _pairsum
from ._validation import check_points

LOG_CONTINUOUS = 0.5 - math.log(2.0)
# third-order constant of the conjectured log-energy expansion
C_HAT = (2.0 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0)
         + 3.0 * math.log(math.sqrt(math.pi) / math.gamma(1.0 / 3.0)))
C_LOWER = -0.22553754


class InfiniteEnergyError(ValueError):
    """Raised when coincident points make a singular energy infinite."""


class PoleError(ValueError):
    """Raised when a quantity is evaluated at a pole."""


@dataclass(frozen=True)
class KernelSpec:
    """Interaction kernel: ``kind`` is ``"log"`` or ``"riesz"`` with exponent ``s``."""

    kind: str
    s: float | None = None

    def __post_init__(self):
        if self.kind == "log":
            object.__setattr__(self, "s", None)
            return
        if self.kind != "riesz":
            raise ValueError(f"kernel kind must be 'log' or 'riesz', got {self.kind!r}")
        s = float(self.s)
        if not math.isfinite(s) or s == 0.0 or s <= -2.0:
            raise ValueError(f"Riesz exponent must satisfy s > -2 and s != 0, got {self.s}")
        object.__setattr__(self, "s", s)

    @classmethod
    def parse(cls, text) -> "KernelSpec":
        """Parse ``"log"`` or ``"s=<real>"`` (a bare number is accepted too)."""
        if isinstance(text, KernelSpec):
            return text
        if isinstance(text, (int, float)):
            return cls("riesz", float(text))
        t = str(text).strip().lower()
        if t == "log":
            return cls("log")
        m = re.fullmatch(r"(?:s\s*=\s*)?([-+]?(?:\d+\.?\d*|\.\d+)(?:e[-+]?\d+)?)", t)
        if not m:
            raise ValueError(f"kernel must be 'log' or 's=<real>', got {text!r}")
        return cls("riesz", float(m.group(1)))

    @property
    def is_log(self) -> bool:
        return self.kind == "log"

    @property
    def label(self) -> str:
        return "log" if self.is_log else f"s={self.s:g}"

    def __str__(self) -> str:
        return self.label


def _kernel_arrays(kernels):
    kinds = np.array([_pairsum.LOG if k.is_log else _pairsum.RIESZ for k in kernels], dtype=np.int64)
    svals = np.array([0.0 if k.is_log else k.s for k in kernels], dtype=np.float64)
    return kinds, svals


def _row_blocks(N: int, n_blocks: int):
    # equal pair counts per block: row i has N - 1 - i partners
    if n_blocks <= 1 or N < 2:
        return [(0, N)]
    total = N * (N - 1) / 2.0
    bounds = [0]
    for b in range(1, n_blocks):
        target = total * b / n_blocks
        # solve i*N - i*(i+1)/2 = target for i
        i = int(N - 0.5 - math.sqrt(max((N - 0.5) ** 2 - 2.0 * target, 0.0)))
        bounds.append(min(max(i, bounds[-1]), N))
    bounds.append(N)
    return [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def discrete_energies(X, kernels, n_jobs: int = 1) -> dict:
    """Energies of one configuration for several kernels in a single pass.

    Returns a dict ``{KernelSpec: E}``.  Rows are summed with compensation and
    combined with ``math.fsum``, so the result is independent of ``n_jobs``.
    """
    kernels = [KernelSpec.parse(k) for k in kernels]
    P = np.ascontiguousarray(check_points(X, min_points=2))
    N = len(P)
    kinds, svals = _kernel_arrays(kernels)
    rows = np.zeros((N, len(kernels)))
    blocks = _row_blocks(N, max(1, int(n_jobs)) * 4 if n_jobs and n_jobs > 1 else 1)

    def work(block):
        lo, hi = block
        return _pairsum.row_sums(P, lo, hi, kinds, svals, rows[lo:hi])

    if len(blocks) == 1:
        bad = work(blocks[0])
    else:
        with ThreadPoolExecutor(max_workers=int(n_jobs)) as pool:
            bad = sum(pool.map(work, blocks))
    if bad:
        raise InfiniteEnergyError("configuration has coincident points; the energy is infinite")
    return {k: 2.0 * math.fsum(rows[:, q]) for q, k in enumerate(kernels)}


def discrete_energy(X, kernel="log", n_jobs: int = 1) -> float:
    """Energy ``sum_{i != j} K(x_i, x_j)`` (see module conventions for signs)."""
    kernel = KernelSpec.parse(kernel)
    return discrete_energies(X, [kernel], n_jobs=n_jobs)[kernel]


def analytic_continuation(s: float) -> float:
    """``V_s = 2^{1-s} / (2 - s)``, defined for every real ``s != 2``."""
    if s == 2.0:
        raise PoleError("V_s has a pole at s = 2")
    return 2.0 ** (1.0 - s) / (2.0 - s)


def continuous_value(kernel) -> float:
    """Energy of the normalized surface measure.

    ``1/2 - log 2`` for the logarithmic kernel, ``2^{1-s}/(2-s)`` for
    ``-2 < s < 2``; the integral diverges for ``s >= 2`` and ``math.inf`` is
    returned.
    """
    kernel = KernelSpec.parse(kernel)
    if kernel.is_log:
        return LOG_CONTINUOUS
    if kernel.s >= 2.0:
        return math.inf
    return analytic_continuation(kernel.s)


def expected_random_energy(kernel, N: int) -> float:
    """Expected energy of ``N`` independent uniform points, ``I[sigma] N (N - 1)``."""
    value = continuous_value(kernel)
    return value * N * (N - 1) if math.isfinite(value) else math.inf


# ------------------------------------------------------------ zeta functions

_CVZ_TERMS = 64


def _cvz_weights(n: int = _CVZ_TERMS):
    """Weights ``w_k`` with ``sum (-1)^k a_k ~ sum w_k a_k`` (Cohen, Villegas, Zagier)."""
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b = -1.0
    c = -d
    w = np.empty(n)
    for k in range(n):
        c = b - c
        w[k] = c * (-1) ** k
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return w / d


_WEIGHTS = _cvz_weights()


def _alternating(terms) -> float:
    """Accelerated ``sum_k (-1)^k terms[k]``."""
    signs = (-1.0) ** np.arange(len(terms))
    return float(np.dot(_WEIGHTS, signs * terms))


def hurwitz_eta(s: float, a: float) -> float:
    """``sum_{k >= 0} (-1)^k (k + a)^{-s}``, valid for all real ``s``."""
    k = np.arange(_CVZ_TERMS, dtype=np.float64)
    return _alternating((k + a) ** (-s))


def riemann_zeta(s: float) -> float:
    """Riemann zeta via the alternating (eta) series, any real ``s != 1``."""
    if s == 1.0:
        raise PoleError("zeta has a pole at s = 1")
    denom = 1.0 - 2.0 ** (1.0 - s)
    return hurwitz_eta(s, 1.0) / denom


def dirichlet_l_minus3(s: float) -> float:
    """``L(s) = 1 - 2^{-s} + 4^{-s} - 5^{-s} + ...`` for the character mod 3.

    Uses ``L(s) = (eta(s, 1/3) + eta(s, 2/3)) / (3^s (1 + 2^{1-s}))`` which holds
    for all real ``s``.
    """
    num = hurwitz_eta(s, 1.0 / 3.0) + hurwitz_eta(s, 2.0 / 3.0)
    return num / (3.0 ** s * (1.0 + 2.0 ** (1.0 - s)))


def epstein_zeta_triangular(s: float) -> float:
    """Epstein zeta of the unit triangular lattice, ``6 zeta(s/2) L(s/2)``."""
    if s == 2.0:
        raise PoleError("the triangular-lattice Epstein zeta has a pole at s = 2")
    return 6.0 * riemann_zeta(s / 2.0) * dirichlet_l_minus3(s / 2.0)


def second_order_coefficient(s: float) -> float:
    """Conjectured coefficient ``(sqrt(3)/2)^{s/2} zeta_L(s) / (4 pi)^{s/2}``.

    It multiplies ``N^{1+s/2}`` in the minimal-energy expansion: second order
    for ``-2 < s < 2``, leading order for ``2 < s < 4``.
    """
    if s in (0.0, 2.0):
        raise PoleError(f"no coefficient at s = {s:g}")
    if not (-2.0 < s < 4.0):
        raise ValueError(f"coefficient defined for -2 < s < 4, got {s}")
    return (math.sqrt(3.0) / 2.0) ** (s / 2.0) * epstein_zeta_triangular(s) / (4.0 * math.pi) ** (s / 2.0)


# ----------------------------------------------------------- normalization

def valid_orders(kernel) -> tuple[int, ...]:
    kernel = KernelSpec.parse(kernel)
    if kernel.is_log:
        return (1, 2, 3)
    if kernel.s == 2.0 or kernel.s >= 4.0:
        return (1,)
    return (1, 2)


def normalize(E: float, N: int, kernel, order: int) -> float:
    """Scale a raw energy into the series plotted against ``N``.

    ==============  =========================================  ============================
    kernel          order 1                                    order 2 / 3
    ==============  =========================================  ============================
    log             ``E / N^2``                                ``(E - I N^2) / (N log N)``,
                                                               ``(E - I N^2 + N log N / 2) / N``
    ``-2 < s < 2``  ``E / N^2``                                ``(E - I N^2) / N^{1+s/2}``
    ``s = 2``       ``E / (N^2 log N)``
    ``2 < s < 4``   ``E / N^{1+s/2}``                          ``(E - C_s N^{1+s/2}) / N^2``
    ==============  =========================================  ============================
    """
    kernel = KernelSpec.parse(kernel)
    if order not in valid_orders(kernel):
        raise ValueError(f"order {order} is not defined for kernel {kernel.label}")
    N = float(N)
    if kernel.is_log:
        I = LOG_CONTINUOUS
        if order == 1:
            return E / N ** 2
        if order == 2:
            return (E - I * N ** 2) / (N * math.log(N))
        return (E - I * N ** 2 + N * math.log(N) / 2.0) / N
    s = kernel.s
    if s < 2.0:
        I = continuous_value(kernel)
        return E / N ** 2 if order == 1 else (E - I * N ** 2) / N ** (1.0 + s / 2.0)
    if s == 2.0:
        return E / (N ** 2 * math.log(N))
    if order == 1:
        return E / N ** (1.0 + s / 2.0)
    return (E - second_order_coefficient(s) * N ** (1.0 + s / 2.0)) / N ** 2


def reference_value(kernel, order: int) -> float | None:
    """Known or conjectured limit of the order-``order`` series, if any."""
    kernel = KernelSpec.parse(kernel)
    if order not in valid_orders(kernel):
        raise ValueError(f"order {order} is not defined for kernel {kernel.label}")
    if kernel.is_log:
        return {1: LOG_CONTINUOUS, 2: -0.5, 3: C_HAT}[order]
    s = kernel.s
    if s < 2.0:
        return continuous_value(kernel) if order == 1 else second_order_coefficient(s)
    if s == 2.0:
        return 0.25
    return second_order_coefficient(s) if order == 1 else analytic_continuation(s)


def normalized_series(X, kernel, order: int, n_jobs: int = 1) -> float:
    """Normalized energy of one configuration (see :func:`normalize`)."""
    kernel = KernelSpec.parse(kernel)
    if order not in valid_orders(kernel):
        raise ValueError(f"order {order} is not defined for kernel {kernel.label}")
    P = check_points(X, min_points=2)
    return normalize(discrete_energy(P, kernel, n_jobs=n_jobs), len(P), kernel, order)


@dataclass
class EnergyReport:
    """Raw energy and its normalized series values (``None`` where undefined)."""

    N: int
    kernel: KernelSpec
    E: float
    order1: float | None
    order2: float | None
    order3: float | None

    @classmethod
    def from_energy(cls, E: float, N: int, kernel) -> "EnergyReport":
        kernel = KernelSpec.parse(kernel)
        vals = {o: normalize(E, N, kernel, o) for o in valid_orders(kernel)}
        return cls(N, kernel, E, vals.get(1), vals.get(2), vals.get(3))


def energy_report(X, kernel, n_jobs: int = 1) -> EnergyReport:
    P = check_points(X, min_points=2)
    kernel = KernelSpec.parse(kernel)
    return EnergyReport.from_energy(discrete_energy(P, kernel, n_jobs=n_jobs), len(P), kernel)


def stolarsky_l2_discrepancy(X, n_jobs: int = 1) -> float:
    """Spherical-cap L2 discrepancy from the distance sum (invariance principle).

    ``D = sqrt((4/3 - (1/N^2) sum_{i != j} |x_i - x_j|) / 4)``.
    """
    P = check_points(X, min_points=2)
    N = len(P)
    radicand = (4.0 / 3.0 - discrete_energy(P, KernelSpec("riesz", -1.0), n_jobs=n_jobs) / N ** 2) / 4.0
    if radicand < -1e-12:
        raise ArithmeticError(f"negative discrepancy radicand {radicand:.3e}")
    return math.sqrt(max(radicand, 0.0))


def l2_discrepancy_monte_carlo(X, n_samples: int = 1_000_000, seed=0) -> tuple[float, float]:
    """Monte-Carlo estimate of ``D^2`` from its cap definition and its standard error.

    Samples a cap centre ``z`` uniformly on the sphere and a height ``t``
    uniformly on ``[-1, 1]``; the integrand is twice the squared difference
    between the empirical and the exact cap measure (the ``t`` integral runs
    over an interval of length 2).
    """
    from ._validation import check_random_state

    P = check_points(X, min_points=1)
    N = len(P)
    rng = check_random_state(seed)
    vals = np.empty(n_samples)
    batch = max(1, 2_000_000 // max(N, 1))
    for lo in range(0, n_samples, batch):
        m = min(batch, n_samples - lo)
        z = rng.standard_normal((m, 3))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        t = rng.uniform(-1.0, 1.0, m)
        frac = np.count_nonzero(z @ P.T >= t[:, None], axis=1) / N
        vals[lo:lo + m] = 2.0 * (frac - (1.0 - t) / 2.0) ** 2
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))
