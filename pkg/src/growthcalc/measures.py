"""Integrability checks for the three reference measure families.

Each family gets a small closed-form or Monte Carlo surrogate:

* Gaussian product measure with geometric variances — the integral of
  ``exp(c |x|^2)`` factorizes, so finiteness reduces to a convergent
  ``prod (1 - 4 c rho^{2q(k+1)})^{-1/2}``.
* Poisson counting measure — expectations ``E[g(N)]`` are a single series in
  the Poisson weights.
* Grey noise in one dimension — a scale mixture of centered Gaussians whose
  mixing variable comes from a positive stable law (Kanter's representation),
  so the characteristic function is a Mittag-Leffler function of ``xi^2``.

The ``hida_condition`` driver ties a measure surrogate to its matching growth
function and sweeps weight levels for the smallest one where the defining
integral is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln, logsumexp

from .growth import (
    GrowthFunctionSpec,
    KONDRATIEV_STREIT,
    ITERATED_EXP_SQRT,
    ParameterError,
    iterated_log,
)

_GAUSSIAN = "gaussian"
_POISSON = "poisson"
_GREY = "grey"
MEASURE_KINDS = (_GAUSSIAN, _POISSON, _GREY)


@dataclass(frozen=True)
class MeasureSurrogate:
    """Parameters of one reference measure plus sampling defaults."""

    kind: str
    rho: float = 0.5
    q: int = 1
    d: int = 32
    theta: float = 1.0
    w: float = 1.0
    lam: float = 1.0
    n: int = 10**6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in MEASURE_KINDS:
            raise ParameterError(f"unknown measure kind {self.kind!r}")
        if self.kind == _GAUSSIAN:
            if not 0.0 < self.rho < 1.0:
                raise ParameterError(f"rho must lie in (0, 1), got {self.rho}")
            if self.q < 0:
                raise ParameterError(f"q must be >= 0, got {self.q}")
        if self.kind == _POISSON and not self.theta > 0.0:
            raise ParameterError(f"theta must be positive, got {self.theta}")
        if self.kind == _GREY:
            if not 0.0 < self.lam <= 1.0:
                raise ParameterError(f"lambda must lie in (0, 1], got {self.lam}")
            if self.n < 100:
                raise ParameterError("grey sampling needs n >= 100")
        if self.w < 0.0:
            raise ParameterError(f"the weight w must be >= 0, got {self.w}")


def gaussian_product(rho: float = 0.5, q: int = 1, d: int = 32) -> MeasureSurrogate:
    return MeasureSurrogate(_GAUSSIAN, rho=rho, q=q, d=d)


def poisson_count(theta: float = 1.0, w: float = 1.0) -> MeasureSurrogate:
    return MeasureSurrogate(_POISSON, theta=theta, w=w)


def grey_1d(lam: float, n: int = 10**6, seed: int = 0, w: float = 1.0) -> MeasureSurrogate:
    return MeasureSurrogate(_GREY, lam=lam, n=n, seed=seed, w=w)


# -- Gaussian product ---------------------------------------------------------


@dataclass(frozen=True)
class FerniqueResult:
    value: float
    log_value: float
    finite: bool
    n_factors: int
    boundary: float          # the leading factor 4 c2 rho^{2q}; >= 1 means divergence
    tail_bound: float
    note: str = ""


def fernique_product(
    rho: float, q: float, c2: float, tail_tol: float = 1e-14
) -> FerniqueResult:
    """``prod_k (1 - 4 c2 rho^{2q(k+1)})^{-1/2}`` — the Gaussian integral of
    ``exp(c2 |x|_{-q}^2)`` over the product measure with variances 2.

    Divergent when the leading factor ``4 c2 rho^{2q} >= 1``, and for ``q = 0``
    (no decay: infinitely many equal factors) whenever ``c2 > 0``.
    """
    if not 0.0 < rho < 1.0:
        raise ParameterError(f"rho must lie in (0, 1), got {rho}")
    if q < 0.0:
        raise ParameterError(f"q must be >= 0, got {q}")
    if c2 < 0.0:
        raise ParameterError(f"c2 must be >= 0, got {c2}")
    if not tail_tol > 0.0:
        raise ParameterError("tail_tol must be positive")
    if c2 == 0.0:
        return FerniqueResult(1.0, 0.0, True, 0, 0.0, 0.0)
    ratio = rho ** (2.0 * q)
    boundary = 4.0 * c2 * ratio
    if boundary >= 1.0:
        return FerniqueResult(
            math.inf, math.inf, False, 0, boundary,
            math.inf, "leading factor 4*c2*rho^(2q) >= 1",
        )
    if q == 0.0:
        return FerniqueResult(
            math.inf, math.inf, False, 0, boundary, math.inf,
            "q = 0 gives infinitely many identical factors",
        )
    log_value = 0.0
    x = boundary
    k = 0
    while True:
        log_value -= 0.5 * math.log1p(-x)
        k += 1
        x *= ratio
        # -log1p(-y) <= y / (1 - y); the remaining geometric tail is bounded
        # by the next term over (1 - ratio).
        tail = 0.5 * (x / (1.0 - x)) / (1.0 - ratio)
        if tail < tail_tol:
            break
        if k >= 10**6:
            raise RuntimeError("fernique_product failed to converge in 1e6 factors")
    return FerniqueResult(math.exp(log_value), log_value, True, k, boundary, tail)


# -- Poisson expectation ------------------------------------------------------


@dataclass(frozen=True)
class PoissonResult:
    value: float
    log_value: float
    finite: bool
    n_terms: int
    tail_bound: float
    witness_k: int | None = None
    note: str = ""


def poisson_sqrtlog_integrand(w: float = 1.0) -> Callable[[int], float]:
    """``log g(k)`` for ``g(k) = exp(sqrt(w) k sqrt(log_1(sqrt(w) k)))``."""
    if w < 0.0:
        raise ParameterError(f"w must be >= 0, got {w}")
    s = math.sqrt(w)

    def log_g(k: int) -> float:
        x = s * k
        return x * math.sqrt(iterated_log(1, x)) if x > 0.0 else 0.0

    return log_g


def poisson_growth_integrand(spec: GrowthFunctionSpec, w: float = 1.0) -> Callable[[int], float]:
    """``log g(k)`` for ``g(k) = u(w k^2)^{1/2}``."""
    if w < 0.0:
        raise ParameterError(f"w must be >= 0, got {w}")

    def log_g(k: int) -> float:
        return 0.5 * spec.log_u(w * float(k) * float(k))

    return log_g


def poisson_integrability(
    theta: float,
    log_integrand: Callable[[int], float],
    tail_tol: float = 1e-12,
    k_cap: int = 100_000,
) -> PoissonResult:
    """``E[g(N)] = sum_k g(k) e^{-theta} theta^k / k!`` for Poisson ``N``.

    Terms are accumulated in the log domain.  Divergence is declared when the
    weighted terms keep growing for a sustained stretch (the integrand beats
    the factorial); convergence stops once a geometric bound on the remaining
    tail drops below ``tail_tol`` relative to the partial sum.
    """
    if not theta > 0.0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if not tail_tol > 0.0:
        raise ParameterError("tail_tol must be positive")
    log_theta = math.log(theta)
    partial = -math.inf
    prev = math.inf
    rises = 0
    for k in range(k_cap + 1):
        lw = log_integrand(k) - theta + k * log_theta - gammaln(k + 1.0)
        partial = float(np.logaddexp(partial, lw))
        if k >= 30 and lw > prev:
            rises += 1
            if rises >= 25:
                return PoissonResult(
                    math.inf, math.inf, False, k + 1, math.inf, witness_k=k,
                    note="terms grow for 25 consecutive k; the factorial loses",
                )
        else:
            rises = 0
        if k >= 10 and lw < prev:
            r = math.exp(lw - prev)
            if r < 0.9:
                log_tail = lw + math.log(r / (1.0 - r))
                if log_tail < math.log(tail_tol) + partial:
                    value = math.exp(partial) if partial < 709.0 else math.inf
                    return PoissonResult(
                        value, partial, True, k + 1, math.exp(log_tail)
                    )
        prev = lw
    raise RuntimeError(f"poisson_integrability undecided after {k_cap} terms")


# -- Grey noise ---------------------------------------------------------------


def grey_sample(lam: float, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` grey-noise variates with ``E exp(i xi X) = E_lam(-xi^2)``.

    ``X = sqrt(2 S) Z`` where ``S = T^{-lam}`` and ``T`` is positive
    ``lam``-stable via Kanter's representation.  ``lam = 1`` degenerates to
    ``sqrt(2) Z``.  The stream draws ``u``, then ``w``, then ``z``, so results
    are reproducible per (lam, n, seed).
    """
    if not 0.0 < lam <= 1.0:
        raise ParameterError(f"lambda must lie in (0, 1], got {lam}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if lam == 1.0:
        z = rng.standard_normal(n)
        return math.sqrt(2.0) * z
    u = np.clip(rng.random(n), 1e-12, 1.0 - 1e-12)
    w = np.maximum(rng.exponential(1.0, n), 1e-300)
    z = rng.standard_normal(n)
    theta = math.pi * u
    with np.errstate(over="ignore", divide="ignore"):
        a = (
            np.sin(lam * theta) ** lam
            * np.sin((1.0 - lam) * theta) ** (1.0 - lam)
            / np.sin(theta)
        ) ** (1.0 / (1.0 - lam))
        t_stable = (a / w) ** ((1.0 - lam) / lam)
        s_mix = t_stable ** (-lam)
    return np.sqrt(2.0 * s_mix) * z


@dataclass(frozen=True)
class GreyResult:
    value: float
    stderr: float
    log_value: float
    n: int
    seed: int
    stable: bool
    top_share: float
    note: str = ""


def grey_integrability(
    lam: float, w: float, n: int = 10**6, seed: int = 0
) -> GreyResult:
    """Monte Carlo estimate of ``E exp((1 - beta)/2 * (w X^2)^{1/(1-beta)})``
    with ``beta = 1 - lam`` — the grey-noise analogue of the Gaussian
    exponential-moment integral.

    The mean is formed through a log-sum, so heavy samples cannot silently
    overflow; instead the estimate is flagged unstable when a 0.1% sliver of
    the sample carries most of the mass or the second moment overflows.
    """
    if not 0.0 < lam <= 1.0:
        raise ParameterError(f"lambda must lie in (0, 1], got {lam}")
    if w < 0.0:
        raise ParameterError(f"w must be >= 0, got {w}")
    x = grey_sample(lam, n, seed)
    expo = 1.0 / (2.0 - lam)
    le = 0.5 * (2.0 - lam) * (w * x * x) ** expo
    log_sum = float(logsumexp(le))
    log_mean = log_sum - math.log(n)
    log_m2 = float(logsumexp(2.0 * le)) - math.log(n)
    note = ""
    if log_m2 < 700.0 and log_mean < 350.0:
        m1 = math.exp(log_mean)
        var = max(math.exp(log_m2) - m1 * m1, 0.0)
        stderr = math.sqrt(var / n)
    else:
        stderr = math.inf
        note = "second moment overflows; the estimate is untrustworthy"
    k_top = max(1, n // 1000)
    top = np.partition(le, n - k_top)[n - k_top:]
    top_share = math.exp(float(logsumexp(top)) - log_sum)
    stable = math.isfinite(stderr) and top_share <= 0.5
    if not stable and not note:
        note = f"top 0.1% of samples carry {top_share:.1%} of the mass"
    value = math.exp(log_mean) if log_mean < 709.0 else math.inf
    return GreyResult(value, stderr, log_mean, n, seed, stable, top_share, note)


# -- Hida-condition driver ----------------------------------------------------


@dataclass(frozen=True)
class HidaReport:
    measure_kind: str
    function_id: str
    p: int
    finite: bool
    smallest_finite_p: int | None
    levels: tuple[dict, ...] = field(default_factory=tuple)
    seed: int | None = None
    notes: str = ""

    def to_json_dict(self) -> dict:
        return {
            "measure": self.measure_kind,
            "function": self.function_id,
            "p": self.p,
            "finite": self.finite,
            "smallest_finite_p": self.smallest_finite_p,
            "levels": list(self.levels),
            "seed": self.seed,
            "notes": self.notes,
        }


_ENVELOPE_C2 = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0)


@lru_cache(maxsize=None)
def _gaussian_envelope(spec: GrowthFunctionSpec) -> tuple[float, float]:
    """Smallest ``c2`` from a fixed ladder with ``u(r)^{1/2} <= c1 e^{c2 r}``
    certified on a grid (the score must peak away from the right edge)."""
    from .growth import default_r_grid

    grid = default_r_grid()
    grid = grid[grid <= 0.98 * spec.faithful_cap]
    lu = np.array([0.5 * spec.log_u(r) for r in grid])
    for c2 in _ENVELOPE_C2:
        score = lu - c2 * grid
        i = int(np.argmax(score))
        if i < grid.size - 1:
            return float(math.exp(score[i])), c2
    raise ParameterError(
        f"{spec.function_id} admits no exponential envelope with c2 <= {_ENVELOPE_C2[-1]}"
    )


def _check_compatibility(surrogate: MeasureSurrogate, spec: GrowthFunctionSpec) -> None:
    if surrogate.kind == _GAUSSIAN:
        if spec.kind != KONDRATIEV_STREIT:
            raise ParameterError(
                "the Gaussian product surrogate pairs with the exp((1+beta) r^(1/(1+beta))) "
                f"family, not {spec.function_id}"
            )
    elif surrogate.kind == _POISSON:
        if not (spec.kind == ITERATED_EXP_SQRT and spec.k == 2):
            raise ParameterError(
                f"the Poisson surrogate pairs with g2, not {spec.function_id}"
            )
    else:
        beta = 1.0 - surrogate.lam
        if spec.kind != KONDRATIEV_STREIT or abs(spec.beta - beta) > 1e-9:
            raise ParameterError(
                f"grey noise with lambda={surrogate.lam} pairs with "
                f"ks(beta={beta:g}), not {spec.function_id}"
            )


def _gaussian_level(surrogate: MeasureSurrogate, spec: GrowthFunctionSpec, p: int) -> dict:
    c1, c2 = _gaussian_envelope(spec)
    # integrand u(|x|_{-p}^2)^{1/2} <= c1 exp(c2 |x|_{-p}^2); the factorized
    # Gaussian integral of the right side is fernique_product(rho, p, c2/2)
    # because the coordinate variances are 2.
    res = fernique_product(surrogate.rho, p, 0.5 * c2)
    return {
        "p": p,
        "finite": res.finite,
        "bound": c1 * res.value if res.finite else math.inf,
        "boundary": res.boundary,
        "c1": c1,
        "c2": c2,
        "n_factors": res.n_factors,
    }


def _poisson_level(surrogate: MeasureSurrogate, spec: GrowthFunctionSpec, p: int) -> dict:
    w = surrogate.rho ** (2.0 * p) * surrogate.w
    res = poisson_integrability(surrogate.theta, poisson_growth_integrand(spec, w))
    return {
        "p": p,
        "finite": res.finite,
        "value": res.value,
        "n_terms": res.n_terms,
        "tail_bound": res.tail_bound,
        "w": w,
    }


def _grey_level(surrogate: MeasureSurrogate, p: int) -> dict:
    w = surrogate.rho ** (2.0 * p) * surrogate.w
    res = grey_integrability(surrogate.lam, w, n=surrogate.n, seed=surrogate.seed)
    return {
        "p": p,
        "finite": res.stable and math.isfinite(res.value),
        "value": res.value,
        "stderr": res.stderr,
        "top_share": res.top_share,
        "w": w,
        "note": res.note,
    }


def hida_condition(
    surrogate: MeasureSurrogate,
    spec: GrowthFunctionSpec,
    p: int = 0,
    p_max: int | None = None,
) -> HidaReport:
    """Check ``int u(|x|_{-p}^2)^{1/2} dmu < inf`` for the matching pair and
    sweep levels ``0..max(p, p_max)`` for the smallest finite one.

    Mismatched (measure, growth function) pairs raise
    :class:`~growthcalc.growth.ParameterError`.
    """
    if p < 0:
        raise ParameterError(f"p must be >= 0, got {p}")
    _check_compatibility(surrogate, spec)
    top = max(p, 4 if p_max is None else p_max)
    levels = []
    smallest = None
    for q in range(top + 1):
        if surrogate.kind == _GAUSSIAN:
            entry = _gaussian_level(surrogate, spec, q)
        elif surrogate.kind == _POISSON:
            entry = _poisson_level(surrogate, spec, q)
        else:
            entry = _grey_level(surrogate, q)
        levels.append(entry)
        if smallest is None and entry["finite"]:
            smallest = q
    finite = levels[p]["finite"] if p < len(levels) else False
    seed = surrogate.seed if surrogate.kind == _GREY else None
    notes = "" if smallest is not None else "no finite level up to the sweep cap"
    return HidaReport(
        surrogate.kind, spec.function_id, p, finite, smallest,
        tuple(levels), seed, notes,
    )
