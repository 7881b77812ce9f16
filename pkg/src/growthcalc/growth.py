"""Growth-function catalog: log-domain evaluation and admissibility certificates.

A growth function is a continuous ``u : [0, inf) -> [1, inf)`` used to weight
a scale of sequence-space norms.  The catalog covers stretched exponentials
(``exp[(1+beta) r^(1/(1+beta))]``), iterated-exponential-of-square-root
functions ``g_k``, inverse-Bell-number power series ``u_k``, plain
exponentials, and explicit power series.

Every value is produced and exchanged as ``log u(r)``: these functions grow
at least like ``exp(c r^eps)``, so linear-domain evaluation overflows doubles
long before the ranges of interest.  Series kinds are summed by windowed
log-sum-exp around the dominant term.

All operations are pure and deterministic.  Module-level caches are
``functools.lru_cache`` memoizations of immutable (read-only) arrays;
concurrent callers at worst duplicate a computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp


class ParameterError(ValueError):
    """A parameter is outside the documented domain of an operation."""


class CapacityError(RuntimeError):
    """A request exceeds the safe range of an exact or truncated computation."""


KONDRATIEV_STREIT = "kondratiev_streit"
ITERATED_EXP_SQRT = "iterated_exp_sqrt"
BELL_SERIES = "bell_series"
POWER_SERIES = "power_series"
EXPONENTIAL = "exponential"

KINDS = (
    KONDRATIEV_STREIT,
    ITERATED_EXP_SQRT,
    BELL_SERIES,
    POWER_SERIES,
    EXPONENTIAL,
)

CONDITION_IDS = ("U0", "U1", "U2", "U3", "C+,1/2", "C+,log")

#: Conditions claimed by the closed-form catalog families.
_STANDARD_CLAIMS = frozenset({"U0", "U1", "U2", "U3"})

# Series tables: number of stored coefficients.  The classical Bell series
# (k=2) gets a large table because the verification grids push it to
# r ~ 1e8 and the L-series machinery probes several times farther; the
# higher-order series are only exercised at moderate r.
_N_BELL2 = 1 << 18
_N_BELL_HIGH = 4096

#: Fraction of the coefficient table the dominant series term may reach
#: before truncation error becomes unaccountable.
_PEAK_FRACTION = 0.92

#: Exact Bell-number computations are quadratic in ``n`` with big integers;
#: beyond this the log-domain float path must be used instead.
_BELL_EXACT_CAP = 1200

#: Largest magnitude the alternating Mittag-Leffler series may reach before
#: the spectral integral takes over.  fsum itself is exactly rounded, but
#: each term carries an exp(gammaln) rounding of order term * 1e-14; with a
#: 1e4 cap that noise stays near 1e-10 absolute, keeping the series at least
#: two digits inside the 1e-8 agreement tolerance wherever it is used.
_ML_SERIES_TERM_CAP = 1.0e4


def iterated_log(k: int, r: float) -> float:
    """k-fold clamped logarithm: ``log_1(r) = log(max(e, r))``, ``log_k = log_1 ∘ log_{k-1}``.

    The clamp makes every iterate total on the reals and equal to 1 below
    ``r = e``.  ``k = 0`` is the identity (it appears as the inner iterate of
    the k=1 member of the iterated-exponential family).
    """
    if k < 0:
        raise ParameterError(f"iterated_log requires k >= 0, got {k}")
    v = float(r)
    for _ in range(k):
        v = math.log(max(math.e, v))
    return v


def bell_numbers(k: int, n_max: int) -> list[int]:
    """Exact k-th order Bell numbers ``b_k(0..n_max)``.

    ``b_k(n) = n! [r^n] exp_k(r)`` where ``exp_1(r) = e^r`` and
    ``exp_j(r) = exp(exp_{j-1}(r) - 1)`` (normalized so ``exp_k(0) = 1``).
    Hence ``b_1 ≡ 1``, ``b_2`` are the classical Bell numbers 1, 1, 2, 5, 15,
    52, ... and ``b_3`` starts 1, 1, 3, 12, 60, 358.

    Differentiating the defining composition once and matching coefficients
    gives the exact-integer recurrence used here::

        b_j(n+1) = sum_{i=0..n} C(n, i) * b_{j-1}(i+1) * b_j(n-i)

    starting from ``b_1 ≡ 1``.
    """
    if k < 1:
        raise ParameterError(f"bell_numbers requires k >= 1, got {k}")
    if n_max < 0:
        raise ParameterError(f"bell_numbers requires n_max >= 0, got {n_max}")
    if k >= 2 and n_max > _BELL_EXACT_CAP:
        raise CapacityError(
            f"exact Bell-number chain is quadratic in n with large integers; "
            f"max supported n_max is {_BELL_EXACT_CAP}, got {n_max}"
        )
    level = [1] * (n_max + 2)
    for _ in range(k - 1):
        prev, level = level, [1]
        for n in range(n_max + 1):
            level.append(
                sum(math.comb(n, i) * prev[i + 1] * level[n - i] for i in range(n + 1))
            )
    return level[: n_max + 1]


def _bell_peak(n: float) -> float:
    """Solve ``j log j = n`` (location of the dominant Dobinski term)."""
    j = max(2.0, n / max(1.0, math.log(max(n, 2.0))))
    for _ in range(50):
        f = j * math.log(j) - n
        j -= f / (math.log(j) + 1.0)
        j = max(j, 1.5)
        if abs(f) < 1e-9 * max(1.0, n):
            break
    return j


@lru_cache(maxsize=None)
def _log_bell_dobinski(n_hi: int) -> np.ndarray:
    """``log B(n)`` for the classical Bell numbers, n = 0..n_hi.

    Dobinski sum ``B(n) = e^{-1} sum_j j^n / j!`` evaluated blockwise: a run
    of consecutive n shares one window of j around the dominant term, which
    keeps the whole table linear-time.  Window half-width 14 sigma leaves a
    relative tail below e^{-90}.
    """
    out = np.empty(n_hi + 1)
    out[0] = 0.0
    block = 1024
    n0 = 1
    while n0 <= n_hi:
        n1 = min(n0 + block - 1, n_hi)
        j_lo_c = _bell_peak(float(n0))
        j_hi_c = _bell_peak(float(n1))
        s_lo = j_lo_c / math.sqrt(n0 + j_lo_c)
        s_hi = j_hi_c / math.sqrt(n1 + j_hi_c)
        lo = max(1, int(j_lo_c - 14.0 * s_lo - 8.0))
        hi = int(j_hi_c + 14.0 * s_hi + 8.0)
        j = np.arange(lo, hi + 1, dtype=float)
        lj = np.log(j)
        lg = gammaln(j + 1.0)
        ns = np.arange(n0, n1 + 1, dtype=float)[:, None]
        ex = ns * lj[None, :] - lg[None, :]
        m = ex.max(axis=1)
        out[n0 : n1 + 1] = m + np.log(np.exp(ex - m[:, None]).sum(axis=1)) - 1.0
        n0 = n1 + 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _egf_log_coeffs(k: int, n_hi: int) -> np.ndarray:
    """``log [r^n] exp_k(r)`` for n = 0..n_hi (normalized ``exp_k(0) = 1``).

    Level k is built from level k-1 through the log-domain convolution
    ``(n+1) c_{n+1} = sum_i (i+1) a_{i+1} c_{n-i}`` (all terms positive, so
    log-sum-exp is exact in the relative sense).
    """
    if k < 1:
        raise ParameterError(f"exp_k requires k >= 1, got {k}")
    n = np.arange(n_hi + 1, dtype=float)
    if k == 1:
        out = -gammaln(n + 1.0)
    else:
        la = _egf_log_coeffs(k - 1, n_hi)
        wa = la[1:] + np.log(np.arange(1, n_hi + 1, dtype=float))
        out = np.empty(n_hi + 1)
        out[0] = 0.0
        for m in range(n_hi):
            out[m + 1] = logsumexp(wa[: m + 1] + out[m::-1]) - math.log(m + 1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GrowthFunctionSpec:
    """A growth function with its parameters and claimed admissibility conditions.

    ``claimed_conditions`` records which of U0-U3 the catalog asserts for the
    function; :func:`check_conditions` produces the corresponding grid
    certificate.  Instances are immutable and hashable so evaluation tables
    can be memoized against them.
    """

    kind: str
    beta: float = 0.0
    k: int = 2
    c: float = 1.0
    log_coeffs: tuple[float, ...] | None = None
    claimed_conditions: frozenset[str] = field(default_factory=frozenset)
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown growth-function kind {self.kind!r}")
        if self.kind == KONDRATIEV_STREIT and not (0.0 <= self.beta < 1.0):
            raise ParameterError(f"beta must lie in [0, 1), got {self.beta}")
        if self.kind in (ITERATED_EXP_SQRT, BELL_SERIES) and self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")
        if self.kind == EXPONENTIAL and not self.c > 0:
            raise ParameterError(f"exponential rate must be positive, got {self.c}")
        if self.kind == POWER_SERIES:
            if not self.log_coeffs:
                raise ParameterError("power_series requires at least one log-coefficient")
            coeffs = tuple(float(x) for x in self.log_coeffs)
            if any(math.isnan(x) or x == math.inf for x in coeffs):
                raise ParameterError("power_series log-coefficients must be < +inf and not NaN")
            object.__setattr__(self, "log_coeffs", coeffs)
        bad = set(self.claimed_conditions) - set(CONDITION_IDS)
        if bad:
            raise ParameterError(f"unknown claimed conditions: {sorted(bad)}")

    # -- identification -------------------------------------------------

    @property
    def function_id(self) -> str:
        if self.label:
            return self.label
        if self.kind == KONDRATIEV_STREIT:
            return f"ks(beta={self.beta:g})"
        if self.kind == ITERATED_EXP_SQRT:
            return f"g{self.k}"
        if self.kind == BELL_SERIES:
            return f"u{self.k}"
        if self.kind == EXPONENTIAL:
            return f"exp({self.c:g}r)"
        return f"power_series[{len(self.log_coeffs or ())}]"

    # -- evaluation ------------------------------------------------------

    def log_u(self, r: float) -> float:
        """``log u(r)`` for a single nonnegative ``r``."""
        r = float(r)
        if math.isnan(r) or r < 0.0:
            raise ParameterError(f"growth functions are defined for r >= 0, got {r}")
        if self.kind == KONDRATIEV_STREIT:
            b1 = 1.0 + self.beta
            return b1 * r ** (1.0 / b1)
        if self.kind == EXPONENTIAL:
            return self.c * r
        if self.kind == ITERATED_EXP_SQRT:
            if r == 0.0:
                return 0.0
            x = iterated_log(self.k - 1, math.sqrt(r))
            return 2.0 * math.sqrt(r * x)
        return _series_log_value(self, r)

    # -- evaluation-range metadata ----------------------------------------

    @property
    def series_cap(self) -> float:
        """Largest ``r`` a series-backed kind can evaluate faithfully."""
        if self.kind == BELL_SERIES:
            return _series_r_cap(self)
        return math.inf

    @property
    def faithful_cap(self) -> float:
        """Largest ``r`` at which the stored representation still represents
        the intended function (used to clip condition-check grids)."""
        if self.kind == BELL_SERIES:
            return self.series_cap
        if self.kind == POWER_SERIES:
            return _power_faithful_cap(self)
        return math.inf

    @property
    def s_max(self) -> float:
        """Upper bracket bound for minimization in ``s = log r``."""
        if self.kind == BELL_SERIES:
            return math.log(self.series_cap)
        return 700.0

    @property
    def t_sup(self) -> float:
        """Largest Legendre argument ``t`` with a certifiably interior minimizer."""
        if self.kind == BELL_SERIES:
            return 0.88 * (len(_series_logc(self)) - 1)
        return math.inf

    @property
    def domain_cap(self) -> float:
        """``r`` beyond which ``u(r)`` itself overflows a double (log u > 709);
        past this point only the log-domain value is meaningful."""
        target = 709.0
        if self.log_u(0.0) > target:  # pragma: no cover - not reachable in catalog
            return 0.0
        lo, hi = 0.0, 1.0
        while self.log_u(min(hi, self.faithful_cap)) < target:
            if hi >= self.faithful_cap:
                return self.faithful_cap
            lo, hi = hi, hi * 4.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.log_u(mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-9 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)


# -- factories ------------------------------------------------------------


def kondratiev_streit(beta: float) -> GrowthFunctionSpec:
    """``u(r) = exp[(1+beta) r^(1/(1+beta))]`` for ``beta`` in [0, 1)."""
    return GrowthFunctionSpec(
        kind=KONDRATIEV_STREIT, beta=float(beta), claimed_conditions=_STANDARD_CLAIMS
    )


def iterated_exp_sqrt(k: int) -> GrowthFunctionSpec:
    """``g_k(r) = exp[2 sqrt(r log_{k-1} sqrt(r))]`` with the clamped iterated log."""
    return GrowthFunctionSpec(
        kind=ITERATED_EXP_SQRT, k=int(k), claimed_conditions=_STANDARD_CLAIMS
    )


def bell_series(k: int) -> GrowthFunctionSpec:
    """``u_k(r) = sum_n r^n / (b_k(n) n!)`` with k-th order Bell numbers."""
    return GrowthFunctionSpec(
        kind=BELL_SERIES, k=int(k), claimed_conditions=_STANDARD_CLAIMS
    )


def exponential(c: float = 1.0) -> GrowthFunctionSpec:
    """``u(r) = exp(c r)``."""
    return GrowthFunctionSpec(
        kind=EXPONENTIAL, c=float(c), claimed_conditions=_STANDARD_CLAIMS
    )


def power_series(
    log_coeffs, claimed_conditions=(), label: str = ""
) -> GrowthFunctionSpec:
    """``u(r) = sum_n exp(log_coeffs[n]) r^n`` (use ``-inf`` for absent terms)."""
    return GrowthFunctionSpec(
        kind=POWER_SERIES,
        log_coeffs=tuple(log_coeffs),
        claimed_conditions=frozenset(claimed_conditions),
        label=label,
    )


def spec_to_dict(spec: GrowthFunctionSpec) -> dict:
    """JSON-ready description of a spec (inverse of :func:`spec_from_dict`)."""
    out: dict = {"kind": spec.kind}
    if spec.kind == KONDRATIEV_STREIT:
        out["beta"] = spec.beta
    elif spec.kind in (ITERATED_EXP_SQRT, BELL_SERIES):
        out["k"] = spec.k
    elif spec.kind == EXPONENTIAL:
        out["c"] = spec.c
    else:
        # JSON has no -Infinity literal; absent terms serialize as null.
        out["log_coeffs"] = [
            None if v == -math.inf else v for v in (spec.log_coeffs or ())
        ]
    if spec.claimed_conditions:
        out["claimed_conditions"] = sorted(spec.claimed_conditions)
    if spec.label:
        out["label"] = spec.label
    return out


def spec_from_dict(d: dict) -> GrowthFunctionSpec:
    """Build a spec from a config mapping like ``{"kind": "kondratiev_streit", "beta": 0.5}``."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ParameterError("function spec must be a mapping with a 'kind' field")
    kind = d["kind"]
    label = d.get("label", "")
    if kind == KONDRATIEV_STREIT:
        spec = kondratiev_streit(d.get("beta", 0.0))
    elif kind == ITERATED_EXP_SQRT:
        spec = iterated_exp_sqrt(d.get("k", 2))
    elif kind == BELL_SERIES:
        spec = bell_series(d.get("k", 2))
    elif kind == EXPONENTIAL:
        spec = exponential(d.get("c", 1.0))
    elif kind == POWER_SERIES:
        coeffs = [
            -math.inf if v is None else float(v) for v in d.get("log_coeffs", ())
        ]
        spec = power_series(coeffs, d.get("claimed_conditions", ()))
    else:
        raise ParameterError(f"unknown growth-function kind {kind!r}")
    if label:
        spec = GrowthFunctionSpec(
            kind=spec.kind,
            beta=spec.beta,
            k=spec.k,
            c=spec.c,
            log_coeffs=spec.log_coeffs,
            claimed_conditions=spec.claimed_conditions,
            label=label,
        )
    return spec


def log_u(spec: GrowthFunctionSpec, r: float) -> float:
    """``log u(r)``; see :meth:`GrowthFunctionSpec.log_u`."""
    return spec.log_u(r)


def log_u_grid(spec: GrowthFunctionSpec, rs: np.ndarray) -> np.ndarray:
    """Vectorized ``log u`` over an array of radii."""
    rs = np.asarray(rs, dtype=float)
    if rs.size and (np.isnan(rs).any() or rs.min() < 0.0):
        raise ParameterError("growth functions are defined for r >= 0")
    if spec.kind == KONDRATIEV_STREIT:
        b1 = 1.0 + spec.beta
        return b1 * rs ** (1.0 / b1)
    if spec.kind == EXPONENTIAL:
        return spec.c * rs
    return np.array([spec.log_u(float(r)) for r in rs])


# -- series internals ------------------------------------------------------


@lru_cache(maxsize=None)
def _series_logc(spec: GrowthFunctionSpec) -> np.ndarray:
    """Log-coefficients ``log c_n`` of ``u(r) = sum c_n r^n`` for series kinds."""
    if spec.kind == POWER_SERIES:
        arr = np.asarray(spec.log_coeffs, dtype=float).copy()
    elif spec.kind == BELL_SERIES:
        if spec.k == 1:
            n = np.arange(_N_BELL2 + 1, dtype=float)
            arr = -gammaln(n + 1.0)
        elif spec.k == 2:
            n = np.arange(_N_BELL2 + 1, dtype=float)
            arr = -(_log_bell_dobinski(_N_BELL2) + gammaln(n + 1.0))
        else:
            n = np.arange(_N_BELL_HIGH + 1, dtype=float)
            arr = -(2.0 * gammaln(n + 1.0) + _egf_log_coeffs(spec.k, _N_BELL_HIGH))
    else:  # pragma: no cover - guarded by callers
        raise ParameterError(f"{spec.kind} is not series-backed")
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _series_gaps(spec: GrowthFunctionSpec) -> np.ndarray:
    """Monotone envelope of ``log c_{n-1} - log c_n`` (dominant-term locator)."""
    logc = _series_logc(spec)
    gaps = np.maximum.accumulate(logc[:-1] - logc[1:])
    gaps.setflags(write=False)
    return gaps


def _series_r_cap(spec: GrowthFunctionSpec) -> float:
    gaps = _series_gaps(spec)
    m = int(_PEAK_FRACTION * len(gaps))
    return float(math.exp(min(gaps[m - 1], 700.0)))


def _power_faithful_cap(spec: GrowthFunctionSpec) -> float:
    logc = np.asarray(spec.log_coeffs, dtype=float)
    idx = np.flatnonzero(np.isfinite(logc))
    if idx.size < 3:
        return math.inf
    slopes = (logc[idx[:-1]] - logc[idx[1:]]) / (idx[1:] - idx[:-1])
    slopes = np.maximum.accumulate(slopes)
    j = max(int(0.8 * (idx.size - 1)) - 1, 0)
    return float(math.exp(min(slopes[j], 700.0)))


def _series_log_value(spec: GrowthFunctionSpec, r: float) -> float:
    logc = _series_logc(spec)
    if r == 0.0:
        return float(logc[0])
    lr = math.log(r)
    n_len = len(logc)
    if spec.kind == POWER_SERIES:
        # Power series are taken at face value (a finite sum is a legitimate
        # function); no truncation guard applies.
        return float(logsumexp(logc + np.arange(n_len, dtype=float) * lr))
    gaps = _series_gaps(spec)
    peak = int(np.searchsorted(gaps, lr, side="right"))
    if peak > _PEAK_FRACTION * (n_len - 1):
        raise CapacityError(
            f"r={r:g} lies beyond the faithful range of {spec.function_id} "
            f"(series stored to n={n_len - 1}, max safe r ~ {spec.series_cap:.3g})"
        )
    half = int(10.0 * math.sqrt(peak + 25.0) + 50.0)
    while True:
        lo = max(0, peak - half)
        hi = min(n_len - 1, peak + half)
        terms = logc[lo : hi + 1] + np.arange(lo, hi + 1, dtype=float) * lr
        m = float(terms.max())
        left_bad = lo > 0 and terms[0] > m - 46.0
        right_bad = hi < n_len - 1 and terms[-1] > m - 46.0
        if not (left_bad or right_bad):
            break
        half *= 2
    return float(m + math.log(np.exp(terms - m).sum()))


# -- Mittag-Leffler ---------------------------------------------------------


def mittag_leffler(lam: float, t: float) -> float:
    """``E_lam(-t)`` for ``lam`` in (0, 1] and ``t >= 0``.

    Dispatch: exact exponential at ``lam = 1``; the alternating series with
    compensated summation while its largest term stays below
    ``_ML_SERIES_TERM_CAP``; otherwise the spectral-integral representation
    (see :func:`mittag_leffler_integral`).  The result lies in (0, 1] and is
    strictly decreasing in ``t``.
    """
    lam, t = float(lam), float(t)
    if not 0.0 < lam <= 1.0:
        raise ParameterError(f"mittag_leffler requires lambda in (0, 1], got {lam}")
    if math.isnan(t) or t < 0.0:
        raise ParameterError(f"mittag_leffler requires t >= 0, got {t}")
    if t == 0.0:
        return 1.0
    if lam == 1.0:
        return math.exp(-t)
    s = mittag_leffler_series(lam, t)
    if s is not None:
        return s
    return mittag_leffler_integral(lam, t)


def mittag_leffler_series(
    lam: float, t: float, term_cap: float = _ML_SERIES_TERM_CAP
) -> float | None:
    """Alternating series ``sum (-t)^n / Gamma(1 + lam n)`` via ``math.fsum``.

    Returns ``None`` when any term magnitude would exceed ``term_cap`` —
    past that point cancellation eats the significand and the spectral
    integral must be used instead.
    """
    if t == 0.0:
        return 1.0
    lt = math.log(t)
    log_cap = math.log(term_cap)
    terms = []
    n = 0
    while True:
        lv = n * lt - gammaln(1.0 + lam * n)
        if lv > log_cap:
            return None
        terms.append(math.exp(lv) if n % 2 == 0 else -math.exp(lv))
        if lv < -41.0 and n > 0 and lv < (n - 1) * lt - gammaln(1.0 + lam * (n - 1)):
            break
        n += 1
        if n > 10_000:  # pragma: no cover - defensive
            return None
    return math.fsum(terms)


def mittag_leffler_integral(lam: float, t: float) -> float:
    """Spectral-integral representation of ``E_lam(-t)`` for ``lam`` in (0, 1).

    ``E_lam(-t) = (sin(lam pi) / (lam pi)) *
    \\int_0^inf exp(-s^{1/lam} t^{1/lam}) / (s^2 + 2 s cos(lam pi) + 1) ds``.

    Completely monotone in ``t`` by construction (the integrand is a mixture
    of decaying exponentials).  Cross-validated against the alternating
    series in their overlap and against ``e^{t^2} erfc(t)`` at ``lam = 1/2``.
    """
    lam, t = float(lam), float(t)
    if not 0.0 < lam < 1.0:
        raise ParameterError(f"the spectral integral requires lambda in (0, 1), got {lam}")
    if t == 0.0:
        return 1.0
    c = math.cos(lam * math.pi)
    x = t ** (1.0 / lam)

    def f(s: float) -> float:
        e = s ** (1.0 / lam) * x
        return math.exp(-min(e, 700.0)) / (s * s + 2.0 * c * s + 1.0)

    pts = {1.0}
    if x > 0.0:
        pts.add(1.0 / x)
    if lam > 0.9:
        # The denominator develops a near-pole at s = 1 as lam -> 1.
        pts.update((0.9, 0.99, 1.01, 1.1))
    total = 0.0
    lo = 0.0
    for p in sorted(pts):
        if p > lo:
            v, _ = integrate.quad(f, lo, p, epsabs=1e-15, epsrel=1e-13, limit=300)
            total += v
            lo = p
    v, _ = integrate.quad(f, lo, np.inf, epsabs=1e-15, epsrel=1e-13, limit=300)
    total += v
    return math.sin(lam * math.pi) / (lam * math.pi) * total


# -- grids and condition certificates ---------------------------------------


def default_r_grid(r_max: float = 1e8, points: int = 400) -> np.ndarray:
    """Geometric grid on [1e-6, r_max] plus a linear refinement down to r = 0."""
    if points < 2 or r_max <= 1e-6:
        raise ParameterError("default_r_grid needs r_max > 1e-6 and points >= 2")
    geo = np.geomspace(1e-6, r_max, points)
    lin = np.linspace(0.0, 1e-6, 33)
    return np.unique(np.concatenate([lin, geo]))


def refine_grid(grid: np.ndarray) -> np.ndarray:
    """Double a grid's density (geometric midpoints between positive nodes)."""
    grid = np.asarray(grid, dtype=float)
    pos = grid[grid > 0.0]
    if pos.size < 2:
        return grid
    mids = np.sqrt(pos[:-1] * pos[1:])
    return np.unique(np.concatenate([grid, mids]))


@dataclass
class ConditionCheck:
    """Outcome of one admissibility condition on one sampling grid."""

    condition: str
    status: str  # "pass" | "fail" | "inconclusive"
    witness_r: float | None = None
    observed: float | None = None
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status,
            "witness_r": self.witness_r,
            "observed": self.observed,
            "note": self.note,
        }


@dataclass
class ConditionReport:
    """Grid certificates for U0-U3 and the two divergence classes.

    Statuses are grid certificates, not proofs: the conditions quantify over
    all of [0, inf) while we sample finitely many points.
    """

    function_id: str
    grid: dict
    checks: dict[str, ConditionCheck]

    def status(self, condition: str) -> str:
        return self.checks[condition].status

    def passed(self, conditions=("U0", "U1", "U2", "U3")) -> bool:
        return all(self.checks[c].status == "pass" for c in conditions)

    def to_json_dict(self) -> dict:
        return {
            "function_id": self.function_id,
            "grid": self.grid,
            "checks": {k: v.to_json_dict() for k, v in self.checks.items()},
        }


def check_conditions(
    spec: GrowthFunctionSpec, r_grid: np.ndarray | None = None
) -> ConditionReport:
    """Certify U0/U1 (infimum, monotonicity), U2 (``log u(r)/r`` bounded),
    U3 (midpoint convexity of ``log u(x^2)``) and the divergence classes
    ``C+,1/2`` / ``C+,log`` on a sampling grid.

    The grid is clipped to the function's faithful range so that truncated
    series are judged on the region where they represent their target.
    """
    if r_grid is None:
        r_grid = default_r_grid()
    r_grid = np.unique(np.asarray(r_grid, dtype=float))
    if r_grid.size == 0:
        raise ParameterError("check_conditions requires a nonempty grid")
    if np.isnan(r_grid).any() or r_grid[0] < 0.0:
        raise ParameterError("condition grids must consist of radii r >= 0")
    cap = spec.faithful_cap
    clipped = bool(cap < math.inf and r_grid[-1] > cap)
    if clipped:
        r_grid = r_grid[r_grid <= 0.98 * cap]
        if r_grid.size < 8:
            raise ParameterError("grid is empty after clipping to the faithful range")

    lu = log_u_grid(spec, r_grid)
    checks: dict[str, ConditionCheck] = {}

    # U0: inf u = 1, i.e. min log u = 0 on the grid.
    i_min = int(np.argmin(lu))
    m = float(lu[i_min])
    if m < -1e-12:
        checks["U0"] = ConditionCheck("U0", "fail", float(r_grid[i_min]), m,
                                      "u drops below 1")
    elif m <= 1e-12:
        checks["U0"] = ConditionCheck("U0", "pass", float(r_grid[i_min]), m,
                                      "grid infimum attains 1")
    else:
        checks["U0"] = ConditionCheck("U0", "inconclusive", float(r_grid[i_min]), m,
                                      "grid infimum stays above 1")

    # U1: u(0) = 1 and u nondecreasing.
    if r_grid[0] != 0.0:
        checks["U1"] = ConditionCheck("U1", "inconclusive", None, None,
                                      "grid does not include r = 0")
    elif abs(lu[0]) > 1e-12:
        checks["U1"] = ConditionCheck("U1", "fail", 0.0, float(lu[0]), "u(0) != 1")
    else:
        d = np.diff(lu)
        tol = 1e-9 * np.maximum(1.0, np.abs(lu[:-1]))
        bad = np.flatnonzero(d < -tol)
        if bad.size:
            j = int(bad[np.argmin(d[bad])])
            checks["U1"] = ConditionCheck("U1", "fail", float(r_grid[j + 1]),
                                          float(d[j]), "u decreases")
        else:
            checks["U1"] = ConditionCheck("U1", "pass", 0.0, float(lu[0]),
                                          "u(0)=1 and nondecreasing on grid")

    # U2: limsup log u(r) / r finite -- judged by the trend over the top
    # decades of the grid.
    pos = r_grid > 0.0
    rp, lp = r_grid[pos], lu[pos]
    tail = rp >= rp[-1] / 100.0
    if tail.sum() < 8:
        tail = np.zeros_like(rp, dtype=bool)
        tail[-min(25, rp.size):] = True
    s = lp[tail] / rp[tail]
    ds = np.diff(s)
    tol = 1e-9 * np.maximum(1.0, np.abs(s[:-1])) + 1e-15
    r_tail = rp[tail]
    if np.all(ds <= tol):
        checks["U2"] = ConditionCheck("U2", "pass", None, float(s.max()),
                                      "log u(r)/r non-increasing over the top decades")
    elif s[-1] > 1.02 * max(s[0], 1e-300) and float(np.median(ds)) > 0.0:
        j = int(np.argmax(ds))
        checks["U2"] = ConditionCheck("U2", "fail", float(r_tail[j + 1]), float(s[-1]),
                                      "log u(r)/r still increasing at the grid edge")
    else:
        checks["U2"] = ConditionCheck("U2", "inconclusive", None, float(s[-1]),
                                      "no clear trend in log u(r)/r")

    # U3: midpoint convexity of F(x) = log u(x^2) on uniform x-grids.
    x_hi_cap = math.sqrt(min(cap * 0.96, 1e16)) if cap < math.inf else 1e4
    worst = math.inf
    worst_x = None
    for x_hi, n_pts in ((min(2.0, x_hi_cap), 161), (min(1e4, x_hi_cap), 801)):
        xs = np.linspace(0.0, x_hi, n_pts)
        F = log_u_grid(spec, xs * xs)
        second = F[:-2] + F[2:] - 2.0 * F[1:-1]
        tol3 = 1e-9 * np.maximum(1.0, np.abs(F[1:-1]))
        margin = second + tol3
        j = int(np.argmin(margin))
        if margin[j] < worst:
            worst = float(margin[j])
            worst_x = float(xs[j + 1])
    if worst >= 0.0:
        checks["U3"] = ConditionCheck("U3", "pass", None, worst,
                                      "log u(x^2) midpoint-convex on sampled triples")
    else:
        checks["U3"] = ConditionCheck("U3", "fail", worst_x, worst,
                                      "convexity violated at sampled triple")

    # Divergence classes: trend of log u / sqrt(r) and log u / log r over the
    # top three decades.
    def _divergence(cond: str, denom: np.ndarray) -> ConditionCheck:
        sel = rp >= rp[-1] / 1000.0
        # ratios against a near-zero denominator say nothing about divergence
        sel &= denom >= 1.0
        if sel.sum() < 6:
            return ConditionCheck(cond, "inconclusive", None, None, "grid too short")
        v = lp[sel] / denom[sel]
        dv = np.diff(v)
        tolv = 1e-9 * np.maximum(1.0, np.abs(v[:-1]))
        if np.all(dv >= -tolv) and v[-1] >= 1.02 * max(v[0], 1e-300):
            return ConditionCheck(cond, "pass", None, float(v[-1]),
                                  "ratio increasing across the top decades")
        if v[-1] < 0.98 * v[0]:
            j = int(np.argmin(dv))
            return ConditionCheck(cond, "fail", float(rp[sel][j + 1]), float(v[-1]),
                                  "ratio decreasing; divergence not supported")
        return ConditionCheck(cond, "inconclusive", None, float(v[-1]),
                              "ratio not clearly divergent on this grid")

    checks["C+,1/2"] = _divergence("C+,1/2", np.sqrt(rp))
    checks["C+,log"] = _divergence("C+,log", np.log(np.maximum(rp, 1e-300)))

    grid_info = {
        "r_min": float(r_grid[0]),
        "r_max": float(r_grid[-1]),
        "points": int(r_grid.size),
    }
    if clipped:
        grid_info["clipped_to_faithful_cap"] = float(cap)
    return ConditionReport(spec.function_id, grid_info, checks)
