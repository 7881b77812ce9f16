"""Machine verification of transform inequalities on explicit grids.

Every check produces a :class:`VerificationReport` with a *worst margin*: the
minimum, over the sampling grid, of ``RHS - LHS`` in the log domain for the
inequality under test.  A check passes iff its worst margin is at least
``-SLACK`` (one shared absolute slack of 1e-9).  Failures carry the witness
point.

Constant/witness searches (equivalence constants, chain-embedding constants)
are restricted to dyadic scale factors and report the constants they found;
candidates whose extremum sits on the right edge of the grid are rejected as
unstable, and accepted constants must survive a 2x grid refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .growth import (
    CapacityError,
    GrowthFunctionSpec,
    ParameterError,
    default_r_grid,
    log_u_grid,
    refine_grid,
)
from .legendre import (
    _R_WIDE,
    _grid_infimum,
    LegendreTable,
    LFunctionEvaluator,
    l_function_wide,
    legendre_sequence,
    legendre_table,
)

SLACK = 1e-9

#: Battery order used by :func:`verify_function` and the CLI.
CHECK_IDS = (
    "table-definition",
    "log-concavity",
    "submultiplicativity",
    "supermultiplicativity",
    "t2t-log-convexity",
    "decreasing-tail",
    "nth-root-decay",
    "lseries-sandwich",
    "lseries-square-bound",
    "lseries-sqrt-bound",
    "equivalence-lseries",
    "equivalence-square",
)


@dataclass
class VerificationReport:
    """Outcome of one inequality check on one grid."""

    check_id: str
    function_id: str
    status: str  # "pass" | "fail"
    worst_margin: float
    witness: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        return {
            "check": self.check_id,
            "function": self.function_id,
            "status": self.status,
            "worst_margin": self.worst_margin if math.isfinite(self.worst_margin) else None,
            "witness": self.witness,
            "constants": self.constants,
            "grid": self.grid,
            "notes": self.notes,
        }


def _report(check_id, function_id, margin, witness, constants, grid, notes="", slack=SLACK):
    status = "pass" if margin >= -slack else "fail"
    return VerificationReport(
        check_id, function_id, status, float(margin), witness, constants, grid, notes
    )


def _int_grid_info(table: LegendreTable) -> dict:
    return {"kind": "integer_t", "n_max": table.n_max}


def _r_grid_info(grid: np.ndarray) -> dict:
    return {
        "kind": "r",
        "r_min": float(grid[0]),
        "r_max": float(grid[-1]),
        "points": int(grid.size),
    }


def _prepare_r_grid(
    spec: GrowthFunctionSpec,
    r_grid,
    u_mul: float = 1.0,
    l_mul: float = 0.0,
) -> np.ndarray:
    """Default (or user) radii, clipped so every derived argument stays inside
    the function's faithful range and the wide L-evaluation range."""
    grid = default_r_grid() if r_grid is None else np.unique(np.asarray(r_grid, float))
    if grid.size == 0 or grid[0] < 0.0:
        raise ParameterError("r grids must be nonempty with r >= 0")
    top = math.inf
    cap = spec.faithful_cap
    if cap < math.inf and u_mul > 0.0:
        top = 0.98 * cap / u_mul
    if l_mul > 0.0:
        top = min(top, 0.90 * _R_WIDE / l_mul)
    clipped = grid[grid <= top]
    if clipped.size < 8:
        raise ParameterError("grid is empty after clipping to the evaluable range")
    return clipped


# -- table-shape checks ------------------------------------------------------


def check_log_concavity(table: LegendreTable) -> VerificationReport:
    """``ell(n) ell(n+2) <= ell(n+1)^2`` on the integer grid."""
    if not table.is_integer_grid or table.n_max < 2:
        raise ParameterError("log-concavity check needs an integer grid with n_max >= 2")
    le = table.log_ell
    margins = 2.0 * le[1:-1] - le[:-2] - le[2:]
    j = int(np.argmin(margins))
    return _report(
        "log-concavity",
        table.function_id,
        float(margins[j]),
        {"n": j},
        {},
        _int_grid_info(table),
    )


def check_submultiplicativity(table: LegendreTable) -> VerificationReport:
    """``ell(0) ell(n+m) <= ell(n) ell(m)`` for all pairs with n+m <= n_max."""
    if not table.is_integer_grid:
        raise ParameterError("submultiplicativity check needs an integer grid")
    le = table.log_ell
    N = table.n_max
    worst = math.inf
    wit = (0, 0)
    for n in range(N + 1):
        m = np.arange(N - n + 1)
        margins = le[n] + le[: N - n + 1] - le[0] - le[n : N + 1]
        j = int(np.argmin(margins))
        if margins[j] < worst:
            worst = float(margins[j])
            wit = (n, int(m[j]))
    return _report(
        "submultiplicativity",
        table.function_id,
        worst,
        {"n": wit[0], "m": wit[1]},
        {},
        _int_grid_info(table),
    )


def check_supermultiplicativity(table: LegendreTable) -> VerificationReport:
    """``ell(n) ell(m) <= ell(0) 2^{2(n+m)} ell(n+m)`` for all pairs n+m <= n_max."""
    if not table.is_integer_grid:
        raise ParameterError("supermultiplicativity check needs an integer grid")
    le = table.log_ell
    N = table.n_max
    two = 2.0 * math.log(2.0)
    worst = math.inf
    wit = (0, 0)
    for n in range(N + 1):
        m = np.arange(N - n + 1)
        margins = le[0] + two * (n + m) + le[n : N + 1] - le[n] - le[: N - n + 1]
        j = int(np.argmin(margins))
        if margins[j] < worst:
            worst = float(margins[j])
            wit = (n, int(m[j]))
    return _report(
        "supermultiplicativity",
        table.function_id,
        worst,
        {"n": wit[0], "m": wit[1]},
        {"factor": "2^(2(n+m))"},
        _int_grid_info(table),
    )


def check_t2t_logconvex(table: LegendreTable) -> VerificationReport:
    """``t -> ell(t) t^{2t}`` is log-convex on a real grid with t > 0."""
    t = table.t
    if t.size < 3 or t[0] <= 0.0:
        raise ParameterError("t2t check needs a real grid with at least 3 points, t > 0")
    F = table.log_ell + 2.0 * t * np.log(t)
    lam = (t[2:] - t[1:-1]) / (t[2:] - t[:-2])
    margins = lam * F[:-2] + (1.0 - lam) * F[2:] - F[1:-1]
    j = int(np.argmin(margins))
    grid = {"kind": "real_t", "t_min": float(t[0]), "t_max": float(t[-1]), "points": int(t.size)}
    return _report(
        "t2t-log-convexity",
        table.function_id,
        float(margins[j]),
        {"t": float(t[j + 1])},
        {},
        grid,
    )


def check_decreasing_tail(table: LegendreTable, n_from: int = 10) -> VerificationReport:
    """``ell(n)`` decreasing from ``n_from`` on."""
    if not table.is_integer_grid or table.n_max <= n_from:
        raise ParameterError(f"decreasing-tail check needs n_max > {n_from}")
    le = table.log_ell
    margins = le[n_from:-1] - le[n_from + 1 :]
    j = int(np.argmin(margins))
    return _report(
        "decreasing-tail",
        table.function_id,
        float(margins[j]),
        {"n": n_from + j},
        {"n_from": n_from},
        _int_grid_info(table),
    )


def check_nth_root(table: LegendreTable, threshold: float = 0.01) -> VerificationReport:
    """Certify ``ell(n)^{1/n} < threshold`` at some stored n."""
    if not table.is_integer_grid or table.n_max < 1:
        raise ParameterError("nth-root check needs an integer grid with n_max >= 1")
    n = np.arange(1, table.n_max + 1, dtype=float)
    roots = np.exp(table.log_ell[1:] / n)
    j = int(np.argmin(roots))
    below = np.flatnonzero(roots < threshold)
    margin = threshold - float(roots[j])
    constants = {"threshold": threshold, "min_root": float(roots[j])}
    if below.size:
        constants["n_certificate"] = int(below[0] + 1)
    notes = "" if below.size else "no index certifies the threshold; grow the table"
    return _report(
        "nth-root-decay",
        table.function_id,
        margin,
        {"n": j + 1},
        constants,
        _int_grid_info(table),
        notes,
    )


def check_table_definition(
    spec: GrowthFunctionSpec,
    table: LegendreTable,
    probe_factors: Sequence[float] = (0.25, 0.5, 0.9, 1.1, 2.0, 4.0),
    tol: float = 1e-7,
) -> VerificationReport:
    """Audit stored rows against the transform's definition.

    Two properties per row: the stored value must equal
    ``log u(r*) - t log r*`` (consistency), and it must not exceed
    ``log u(r) - t log r`` at probe radii around ``r*`` (the infimum
    property).  Tolerances scale with ``max(1, |log ell|)``, so a 1% change
    in any entry is far outside them.
    """
    worst = math.inf
    wit: dict = {}
    cap = spec.faithful_cap
    for ti, li, ri in zip(table.t, table.log_ell, table.r_star):
        scale = tol * max(1.0, abs(li))
        if ti == 0.0:
            direct = _grid_infimum(spec)
            margin = scale - abs(direct - li)
            if ri != 0.0:
                margin = min(margin, -1.0)
            if margin < worst:
                worst, wit = margin, {"t": float(ti), "property": "grid-infimum"}
            continue
        if not ri > 0.0:
            worst, wit = -1.0, {"t": float(ti), "property": "r_star-positive"}
            break
        direct = spec.log_u(ri) - ti * math.log(ri)
        margin = scale - abs(direct - li)
        if margin < worst:
            worst, wit = margin, {"t": float(ti), "property": "value-at-r_star"}
        for fac in probe_factors:
            rp = fac * ri
            if not 0.0 < rp <= 0.98 * cap:
                continue
            probe_val = spec.log_u(rp) - ti * math.log(rp)
            margin = probe_val - li + scale
            if margin < worst:
                worst, wit = margin, {"t": float(ti), "property": f"infimum@{fac:g}r*"}
    return _report(
        "table-definition",
        table.function_id,
        worst,
        wit,
        {"tol": tol, "probe_factors": list(probe_factors)},
        _int_grid_info(table) if table.is_integer_grid else {"kind": "real_t"},
        slack=0.0,
    )


def corrupt_table(
    table: LegendreTable, index: int, factor: float = 1.01, which: str = "ell"
) -> LegendreTable:
    """A copy of ``table`` with one entry multiplied by ``factor`` (in the
    linear domain).  Used to exercise corruption detection."""
    if not 0 <= index < table.n_points:
        raise ParameterError(f"index {index} outside table of {table.n_points} rows")
    if not factor > 0.0:
        raise ParameterError("corruption factor must be positive")
    if which == "ell":
        col = table.log_ell.copy()
        col[index] += math.log(factor)
        return table.replace(log_ell=col)
    if which == "r_star":
        col = table.r_star.copy()
        col[index] *= factor
        return table.replace(r_star=col)
    raise ParameterError(f"unknown column {which!r}; use 'ell' or 'r_star'")


# -- L-series comparison checks ----------------------------------------------


def check_lfunction_sandwich(
    spec: GrowthFunctionSpec,
    evaluator: LFunctionEvaluator,
    a: float = 2.0,
    r_grid=None,
) -> VerificationReport:
    """Two-sided comparison of ``L_u`` with ``u``:

    (1) ``L_u(r) <= (e a / log a) u(a r)`` pointwise on the grid (asserted);
    (2) ``u(r) <= C L_u(4 r)`` with the witness ``C`` taken as the grid
        maximum of the ratio, which must be stable under 2x refinement.
    """
    if not a > 1.0:
        raise ParameterError(f"the sandwich requires a > 1, got {a}")
    grid = _prepare_r_grid(spec, r_grid, u_mul=max(a, 1.0), l_mul=4.0)
    const1 = math.log(math.e * a / math.log(a))
    lu_ar = log_u_grid(spec, a * grid)
    logl_r = np.array([l_function_wide(evaluator, float(r)) for r in grid])
    margins = const1 + lu_ar - logl_r
    j = int(np.argmin(margins))

    def ratio_max(g: np.ndarray) -> tuple[float, float]:
        lu = log_u_grid(spec, g)
        ll4 = np.array([l_function_wide(evaluator, float(4.0 * r)) for r in g])
        diffs = lu - ll4
        i = int(np.argmax(diffs))
        return float(diffs[i]), float(g[i])

    log_c, r_at = ratio_max(grid)
    log_c_fine, _ = ratio_max(_prepare_r_grid(spec, refine_grid(grid), u_mul=1.0, l_mul=4.0))
    stable = abs(log_c_fine - log_c) <= 0.1
    margin = float(margins[j]) if stable else -math.inf
    notes = "" if stable else "part-2 constant drifts under grid refinement"
    return _report(
        "lseries-sandwich",
        spec.function_id,
        margin,
        {"r": float(grid[j]), "r_part2": r_at},
        {
            "a": a,
            "C_part1": math.e * a / math.log(a),
            "C_part2": math.exp(log_c),
            "C_part2_refined": math.exp(log_c_fine),
        },
        _r_grid_info(grid),
        notes,
    )


def check_lemma_square(evaluator: LFunctionEvaluator, r_grid=None) -> VerificationReport:
    """``L_u(r)^2 <= ell(0) L_u(8 r)`` on the grid."""
    spec = evaluator.spec
    grid = _prepare_r_grid(spec, r_grid, u_mul=0.0, l_mul=8.0)
    le0 = float(evaluator.table.log_ell[0])
    logl = np.array([l_function_wide(evaluator, float(r)) for r in grid])
    logl8 = np.array([l_function_wide(evaluator, float(8.0 * r)) for r in grid])
    margins = le0 + logl8 - 2.0 * logl
    j = int(np.argmin(margins))
    return _report(
        "lseries-square-bound",
        spec.function_id,
        float(margins[j]),
        {"r": float(grid[j])},
        {"log_ell0": le0},
        _r_grid_info(grid),
    )


def check_lemma_sqrt(
    spec: GrowthFunctionSpec,
    evaluator: LFunctionEvaluator,
    a: float = 2.0,
    r_grid=None,
) -> VerificationReport:
    """``L_u(r) <= sqrt(ell(0) (e a / log a)) u(8 a r)^{1/2}`` on the grid."""
    if not a > 1.0:
        raise ParameterError(f"the sqrt bound requires a > 1, got {a}")
    grid = _prepare_r_grid(spec, r_grid, u_mul=8.0 * a, l_mul=1.0)
    le0 = float(evaluator.table.log_ell[0])
    const = 0.5 * (le0 + math.log(math.e * a / math.log(a)))
    lu = log_u_grid(spec, 8.0 * a * grid)
    logl = np.array([l_function_wide(evaluator, float(r)) for r in grid])
    margins = const + 0.5 * lu - logl
    j = int(np.argmin(margins))
    return _report(
        "lseries-sqrt-bound",
        spec.function_id,
        float(margins[j]),
        {"r": float(grid[j])},
        {"a": a, "log_const": const},
        _r_grid_info(grid),
    )


# -- equivalence and chain order ----------------------------------------------


LogFunction = Callable[[float], float]


def _as_logfun(obj, fallback_id: str) -> tuple[Callable[[np.ndarray], np.ndarray], str]:
    if isinstance(obj, GrowthFunctionSpec):
        return (lambda rs: log_u_grid(obj, rs)), obj.function_id
    if callable(obj):
        fun = lambda rs: np.array([obj(float(r)) for r in rs])
        return fun, fallback_id
    raise ParameterError("equivalence operands must be specs or log-evaluators")


def equivalence_witness(
    f,
    g,
    r_grid=None,
    max_pow: int = 12,
    f_id: str = "f",
    g_id: str = "g",
    refinement_tol: float = 0.1,
) -> VerificationReport:
    """Search dyadic witnesses for ``c1 f(a1 r) <= g(r) <= c2 f(a2 r)``.

    ``a2`` ascends 1, 2, 4, ... and ``a1`` descends 1, 1/2, 1/4, ...; for each
    candidate the constant is the extremal log-difference over the grid.  A
    candidate is rejected when its extremum sits on the right edge of the
    grid (the constant would keep growing with the grid) or when the constant
    moves by more than ``refinement_tol`` in the log domain under a 2x grid
    refinement.  The first surviving pair on each side is reported.
    """
    f_fun, f_id = _as_logfun(f, f_id)
    g_fun, g_id = _as_logfun(g, g_id)
    if r_grid is None:
        r_grid = default_r_grid()
    grid = np.unique(np.asarray(r_grid, dtype=float))
    if grid.size < 8 or grid[0] < 0.0:
        raise ParameterError("equivalence search needs a grid of radii r >= 0")
    fine = refine_grid(grid)
    g_base = g_fun(grid)
    g_fine = g_fun(fine)

    def side(direction: int) -> dict | None:
        # direction +1: upper bound (c2, a2); -1: lower bound (c1, a1)
        for p in range(max_pow + 1):
            a = float(2.0**p) if direction > 0 else float(2.0**-p)
            try:
                diffs = g_base - f_fun(a * grid)
            except CapacityError:
                return None  # larger |log a| only pushes further out of range
            ext = np.argmax(diffs) if direction > 0 else np.argmin(diffs)
            ext = int(ext)
            if ext == grid.size - 1:
                continue
            log_c = float(diffs[ext])
            try:
                diffs_fine = g_fine - f_fun(a * fine)
            except CapacityError:
                return None
            log_c_fine = float(np.max(diffs_fine) if direction > 0 else np.min(diffs_fine))
            if abs(log_c_fine - log_c) > refinement_tol:
                continue
            return {
                "a": a,
                "log_c": log_c,
                "log_c_refined": log_c_fine,
                "r_extremum": float(grid[ext]),
            }
        return None

    upper = side(+1)
    lower = side(-1)
    check_id = "equivalence"
    fn_id = f"({f_id},{g_id})"
    if upper is None or lower is None:
        missing = []
        if upper is None:
            missing.append("upper")
        if lower is None:
            missing.append("lower")
        return VerificationReport(
            check_id,
            fn_id,
            "fail",
            -math.inf,
            {},
            {},
            _r_grid_info(grid),
            f"no stable dyadic witness for the {' and '.join(missing)} bound",
        )
    constants = {
        "c1": math.exp(lower["log_c"]),
        "a1": lower["a"],
        "c2": math.exp(upper["log_c"]),
        "a2": upper["a"],
        "c1_refined": math.exp(lower["log_c_refined"]),
        "c2_refined": math.exp(upper["log_c_refined"]),
    }
    witness = {"r_upper": upper["r_extremum"], "r_lower": lower["r_extremum"]}
    return _report(check_id, fn_id, 0.0, witness, constants, _r_grid_info(grid))


def check_chain_order(
    specs: Sequence[GrowthFunctionSpec], n_max: int = 60, max_pow: int = 12
) -> VerificationReport:
    """Certify the embedding order of a chain of spaces, smallest first.

    For each adjacent pair (A, B) — A the smaller test space, i.e. the more
    slowly growing weight — we need ``ell_A(n) <= C a^n ell_B(n)`` with a
    dyadic ``a``.  On a finite integer range the certificate is that the
    margin sequence ``log ell_A(n) - log ell_B(n) - n log a`` is
    non-increasing over its final stretch (so the constant taken from the
    grid maximum cannot be overrun beyond it).
    """
    if len(specs) < 2:
        raise ParameterError("chain check needs at least two functions")
    tables = [legendre_sequence(s, n_max) for s in specs]
    pairs = []
    worst = math.inf
    tail_len = min(12, max(4, n_max // 4))
    for (sa, ta), (sb, tb) in zip(zip(specs, tables), zip(specs[1:], tables[1:])):
        found = None
        for p in range(max_pow + 1):
            a = float(2.0**p)
            m = ta.log_ell - tb.log_ell - np.arange(n_max + 1) * math.log(a)
            tail_steps = np.diff(m[-tail_len:])
            margin = -float(np.max(tail_steps))
            if margin >= -SLACK:
                j = int(np.argmax(m))
                found = {
                    "small": sa.function_id,
                    "big": sb.function_id,
                    "a": a,
                    "C": float(math.exp(min(m[j], 700.0))),
                    "argmax_n": j,
                    "tail_margin": margin,
                }
                worst = min(worst, margin)
                break
        if found is None:
            return VerificationReport(
                "chain-order",
                ">".join(s.function_id for s in specs),
                "fail",
                -math.inf,
                {"pair": (sa.function_id, sb.function_id)},
                {"pairs": pairs},
                {"kind": "integer_t", "n_max": n_max},
                "no dyadic factor gives a non-increasing tail margin",
            )
        pairs.append(found)
    return _report(
        "chain-order",
        ">".join(s.function_id for s in specs),
        worst,
        {},
        {"pairs": pairs},
        {"kind": "integer_t", "n_max": n_max},
    )


# -- battery -----------------------------------------------------------------


def verify_function(
    spec: GrowthFunctionSpec,
    n_max: int = 60,
    evaluator: LFunctionEvaluator | None = None,
    r_grid=None,
    checks: Sequence[str] | None = None,
    a: float = 2.0,
) -> list[VerificationReport]:
    """Run the default battery of checks for one catalog function."""
    wanted = tuple(checks) if checks is not None else CHECK_IDS
    unknown = set(wanted) - set(CHECK_IDS)
    if unknown:
        raise ParameterError(f"unknown checks: {sorted(unknown)}")
    table = legendre_sequence(spec, n_max)
    if evaluator is None:
        evaluator = LFunctionEvaluator.from_spec(spec)
    reports = []
    for check in wanted:
        if check == "table-definition":
            reports.append(check_table_definition(spec, table))
        elif check == "log-concavity":
            reports.append(check_log_concavity(table))
        elif check == "submultiplicativity":
            reports.append(check_submultiplicativity(table))
        elif check == "supermultiplicativity":
            reports.append(check_supermultiplicativity(table))
        elif check == "t2t-log-convexity":
            t_real = legendre_table(spec, np.arange(0.5, 50.01, 0.25))
            reports.append(check_t2t_logconvex(t_real))
        elif check == "decreasing-tail":
            reports.append(check_decreasing_tail(table))
        elif check == "nth-root-decay":
            reports.append(check_nth_root(evaluator.table))
        elif check == "lseries-sandwich":
            reports.append(check_lfunction_sandwich(spec, evaluator, a=a, r_grid=r_grid))
        elif check == "lseries-square-bound":
            reports.append(check_lemma_square(evaluator, r_grid=r_grid))
        elif check == "lseries-sqrt-bound":
            reports.append(check_lemma_sqrt(spec, evaluator, a=a, r_grid=r_grid))
        elif check == "equivalence-lseries":
            rep = equivalence_witness(
                spec,
                lambda r: l_function_wide(evaluator, r),
                r_grid=r_grid,
                g_id=f"L[{spec.function_id}]",
            )
            rep.check_id = "equivalence-lseries"
            reports.append(rep)
        elif check == "equivalence-square":
            rep = equivalence_witness(
                spec,
                lambda r: 2.0 * spec.log_u(r),
                r_grid=r_grid,
                g_id=f"{spec.function_id}^2",
            )
            rep.check_id = "equivalence-square"
            reports.append(rep)
    return reports


def summary_table(reports: Sequence[VerificationReport]) -> str:
    """Fixed-width human-readable summary of a report batch."""
    lines = [f"{'check':<24} {'function':<22} {'status':<6} worst_margin"]
    for rep in reports:
        margin = f"{rep.worst_margin:.3e}" if math.isfinite(rep.worst_margin) else "-inf"
        lines.append(f"{rep.check_id:<24} {rep.function_id:<22} {rep.status:<6} {margin}")
    return "\n".join(lines)
