"""Continuity bounds and the catalytic contradiction, tabulated.

For a candidate bound ``K t (log2 D)^alpha + eta(t)`` on ``|f(mu) - f(nu)|``
(``t = ||mu - nu||_1``, ``D`` the dimension) this module evaluates the
right-hand side, searches state batteries for violations, and builds the
table that shows why ``alpha < 1`` cannot hold for an additive,
permutation-invariant, non-constant ``f``: the gap ``c = |f(rho) - f(sigma)|``
survives tensoring with the catalyst while ``||Gamma - Gamma'||_1 <= 2/(n-1)``
shrinks faster than ``((n+1) log2 d)^alpha`` grows.
"""
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .catalyst import DENSE_CAP, build_catalyst, catalyst_trace_distance, shift_catalyst
from .measures import (
    audit_additivity,
    find_nonconstancy_witness,
    audit_cyclic_invariance,
    audit_permutation_invariance,
    evaluate_mixture,
)
from .states import DensityMatrix, Partition, sample_random_state, tensor, trace_distance

__all__ = [
    "EtaModel",
    "ContinuityParams",
    "continuity_rhs",
    "ContinuityReport",
    "audit_continuity",
    "DemoRow",
    "DemoTable",
    "HypothesisFailure",
    "DEFAULT_ALPHAS",
    "theorem_demo",
    "demo_csv",
    "CSV_COLUMNS",
    "format_int",
    "FitResult",
    "fit_continuity_exponent",
    "theorem_family",
    "FANNES_ETA",
    "AuditSuite",
    "run_audits",
]

DEFAULT_ALPHAS = (0.25, 0.5, 0.75, 0.9, 1.0)
CSV_COLUMNS = ("n", "D", "c", "T", "bound_T", "alpha", "rhs", "rhs_paper", "crossed")

_CONTINUITY_TOL = 1e-8


@dataclass(frozen=True)
class EtaModel:
    """The vanishing term ``eta(t)``: ``"zero"``, ``"linear"`` (c t) or ``"tlog"`` (c t log2(1/t))."""

    kind: str = "zero"
    coef: float = 1.0

    def __post_init__(self):
        if self.kind not in ("zero", "linear", "tlog"):
            raise ValueError(f"unknown eta model {self.kind!r}")

    def __call__(self, t):
        t = float(t)
        if self.kind == "zero" or t == 0.0:
            return 0.0
        if self.kind == "linear":
            return self.coef * t
        return self.coef * t * math.log2(1.0 / t)


@dataclass(frozen=True)
class ContinuityParams:
    K: float = 1.0
    alpha: float = 1.0
    eta: EtaModel = field(default_factory=EtaModel)

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("K must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")


def _log2(D):
    if D < 2:
        raise ValueError(f"dimension must be >= 2, got {D}")
    return math.log2(D)


def continuity_rhs(params, t, D):
    """``K t (log2 D)^alpha + eta(t)``; with ``alpha = 1`` the plain asymptotic-continuity bound."""
    if not -1e-12 <= t <= 2 + 1e-12:
        raise ValueError(f"1-norm distance {t} outside [0, 2]")
    t = min(max(float(t), 0.0), 2.0)
    return params.K * t * _log2(D) ** params.alpha + params.eta(t)


@dataclass(frozen=True)
class ContinuityReport:
    max_violation: float
    worst_index: int
    violations: tuple = field(repr=False)
    tolerance: float = _CONTINUITY_TOL

    @property
    def passed(self):
        return self.max_violation <= self.tolerance


def audit_continuity(f, pairs, params, partitions=None):
    """Largest ``|f(mu) - f(nu)| - rhs`` over ``pairs``.

    A positive value (beyond 1e-8) certifies that ``params`` is not a valid
    continuity bound for ``f``.
    """
    violations = []
    for i, (mu, nu) in enumerate(pairs):
        if mu.dim != nu.dim:
            raise ValueError("pairs must share a dimension")
        pm, pn = partitions[i] if partitions is not None else (None, None)
        t = trace_distance(mu, nu).norm
        gap = abs(f(mu, pm) - f(nu, pn))
        violations.append(gap - continuity_rhs(params, min(t, 2.0), max(mu.dim, 2)))
    worst = int(np.argmax(violations)) if violations else -1
    return ContinuityReport(max(violations, default=-math.inf), worst, tuple(violations))


@dataclass(frozen=True)
class DemoRow:
    n: int
    D: int
    c: float
    T: float
    bound_T: float
    alpha: float
    rhs: float
    rhs_paper: float
    crossed: bool
    eta: float = 0.0
    c_dense: float = None

    def check(self, tol=1e-9):
        """Row invariants: ``T <= 2/(n-1)`` and ``rhs <= rhs_paper``."""
        return self.T <= self.bound_T + tol and self.rhs <= self.rhs_paper * (1 + tol)


@dataclass(frozen=True)
class DemoTable:
    rows: tuple
    c: float
    crossovers: dict

    def by_alpha(self, alpha):
        return [r for r in self.rows if r.alpha == alpha]


class HypothesisFailure(ValueError):
    """The measure failed an audit the contradiction argument relies on."""


def _check_hypotheses(f, rho, sigma, partition):
    pairs = [(rho, sigma), (sigma, rho), (rho, rho), (sigma, sigma)]
    parts = None if partition is None else [(partition, partition)] * len(pairs)
    add = audit_additivity(f, pairs, parts)
    if not f.additive or not add.passed:
        raise HypothesisFailure(f"{f.name}: additivity fails (residual {add.max_residual:.3e})")
    joint = tensor(tensor(rho, sigma), rho)
    if partition is None:
        perm = audit_permutation_invariance(f, joint)
    else:
        perm = audit_cyclic_invariance(f, joint, partition, 3)
    if not f.permutation_invariant or not perm.passed:
        raise HypothesisFailure(f"{f.name}: permutation invariance fails (residual {perm.max_residual:.3e})")
    return add, perm


def _demo_n(rho, sigma, f, n, c, K, alphas, eta, method, dense_cap, dense_check_cap, partition):
    gamma = build_catalyst(rho, sigma, n)
    gamma_p = shift_catalyst(gamma)
    T = catalyst_trace_distance(gamma, gamma_p, method=method, dense_cap=dense_cap)
    d = rho.dim
    c_dense = None
    if d ** (n + 1) <= dense_check_cap:
        part = None if partition is None else partition.copies(n + 1)
        c_dense = abs(
            evaluate_mixture(f, gamma.prepend(0), part, dense_cap=dense_check_cap)
            - evaluate_mixture(f, gamma.prepend(1), part, dense_cap=dense_check_cap)
        )
    bound_T = 2.0 / (n - 1)
    log2d = math.log2(d)
    log2D = (n + 1) * log2d
    rows = []
    for a in alphas:
        rhs = K * T * log2D**a
        rhs_paper = 2.0 * K / (n - 1) * (n + 1) ** a * log2d**a
        rows.append(
            DemoRow(
                n=n,
                D=d ** (n + 1),
                c=c,
                T=T,
                bound_T=bound_T,
                alpha=a,
                rhs=rhs,
                rhs_paper=rhs_paper,
                crossed=rhs_paper < c,
                eta=eta(min(T, 2.0)),
                c_dense=c_dense,
            )
        )
    return rows


def theorem_demo(
    rho,
    sigma,
    f,
    n_list,
    alpha_list=DEFAULT_ALPHAS,
    K=1.0,
    eta=EtaModel(),
    method="auto",
    dense_cap=DENSE_CAP,
    dense_check_cap=1024,
    partition=None,
    check_hypotheses=True,
    workers=1,
):
    """Tabulate ``c`` against the continuity right-hand side along the catalyst family.

    ``c = |f(rho) - f(sigma)|`` is computed once; by additivity and
    permutation invariance it equals ``|f(sigma (x) Gamma') - f(sigma (x) Gamma)|``
    for every ``n``.  Where ``d**(n+1) <= dense_check_cap`` the row also
    records ``c_dense = |f(rho (x) Gamma) - f(sigma (x) Gamma)|`` evaluated on
    dense matrices.  ``crossed`` marks rows where the bound
    ``2K/(n-1) (n+1)^alpha (log2 d)^alpha`` has fallen below ``c``; the
    ``eta`` term is reported per row but left out of that comparison.
    """
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list must be non-empty")
    if any(n < 2 for n in n_list):
        raise ValueError("n must be >= 2")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    alphas = tuple(float(a) for a in alpha_list)
    if any(not 0 < a <= 1 for a in alphas):
        raise ValueError("alpha values must lie in (0, 1]")
    if partition is not None and partition.shape != rho.shape:
        raise ValueError("partition shape must match the states")

    if check_hypotheses:
        _check_hypotheses(f, rho, sigma, partition)
    c = abs(f(rho, partition) - f(sigma, partition))
    if c <= 1e-9:
        raise HypothesisFailure("f(rho) == f(sigma): the pair is not a non-constancy witness")

    args = (c, K, alphas, eta, method, dense_cap, dense_check_cap, partition)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda n: _demo_n(rho, sigma, f, n, *args), n_list))
    else:
        chunks = [_demo_n(rho, sigma, f, n, *args) for n in n_list]
    rows = tuple(r for chunk in chunks for r in chunk)

    crossovers = {}
    for a in alphas:
        hit = [r.n for r in rows if r.alpha == a and r.crossed]
        crossovers[a] = hit[0] if hit else None
    return DemoTable(rows, c, crossovers)


def format_int(value, digits=12):
    """An integer in ``%.{digits}g`` style, exact for arbitrarily large values."""
    value = int(value)
    if value < 0:
        return "-" + format_int(-value, digits)
    if value < 10**digits:
        return str(value)
    e = int(value.bit_length() * math.log10(2))
    while 10 ** (e + 1) <= value:
        e += 1
    while 10**e > value:
        e -= 1
    q = value // 10 ** (e - digits)
    q = (q + 5) // 10
    if q >= 10**digits:
        q //= 10
        e += 1
    mant = str(q).rstrip("0")
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{body}e+{e:02d}"


def _fmt(x):
    return format(float(x), ".12g")


def demo_csv(table):
    """The table as CSV text with columns :data:`CSV_COLUMNS`."""
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for r in table.rows:
        fields = (
            str(r.n),
            format_int(r.D),
            _fmt(r.c),
            _fmt(r.T),
            _fmt(r.bound_T),
            _fmt(r.alpha),
            _fmt(r.rhs),
            _fmt(r.rhs_paper),
            "1" if r.crossed else "0",
        )
        out.write(",".join(fields) + "\n")
    return out.getvalue()


@dataclass(frozen=True)
class FitResult:
    alpha: float
    stderr: float
    band: tuple
    K: float
    residuals: tuple = field(repr=False)


def fit_continuity_exponent(delta_f, distances, log2_dims, confidence=0.95):
    """Least-squares exponent ``alpha`` in ``delta_f ~ K * T * (log2 D)^alpha``.

    Regresses ``log(delta_f / T)`` on ``log(log2 D)``.  ``band`` is the
    two-sided Student-t interval at ``confidence``.
    """
    df = np.asarray(delta_f, dtype=float)
    t = np.asarray(distances, dtype=float)
    ld = np.asarray(log2_dims, dtype=float)
    if not df.shape == t.shape == ld.shape or df.ndim != 1:
        raise ValueError("delta_f, distances and log2_dims must be equal-length 1-d sequences")
    if df.size < 4:
        raise ValueError("need at least 4 family members")
    if np.any(t <= 0) or np.any(df <= 0):
        raise ValueError("degenerate family: all differences and distances must be positive")
    if np.any(ld <= 0):
        raise ValueError("log2 dimensions must be positive")
    x = np.log(ld)
    y = np.log(df) - np.log(t)
    fit = stats.linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    half = stats.t.ppf(0.5 + confidence / 2, df.size - 2) * fit.stderr
    return FitResult(
        alpha=float(fit.slope),
        stderr=float(fit.stderr),
        band=(float(fit.slope - half), float(fit.slope + half)),
        K=float(np.exp(fit.intercept)),
        residuals=tuple(float(r) for r in resid),
    )


def theorem_family(rho, sigma, f, n_list, method="auto", partition=None):
    """``(delta_f, T, log2 D)`` along the catalyst family, ready for :func:`fit_continuity_exponent`."""
    c = abs(f(rho, partition) - f(sigma, partition))
    log2d = math.log2(rho.dim)
    delta, dist, logs = [], [], []
    for n in n_list:
        gamma = build_catalyst(rho, sigma, n)
        delta.append(c)
        dist.append(catalyst_trace_distance(gamma, shift_catalyst(gamma), method=method))
        logs.append((n + 1) * log2d)
    return np.array(delta), np.array(dist), np.array(logs)


#: Coefficient of the ``tlog`` eta model used by the default audit battery.
#: With ``c = ln 2`` the bound ``t + c t log2(1/t)`` dominates the qubit
#: Audenaert-Fannes bound ``h(t/2)`` on all of ``[0, 2]``, and it is the only such
#: coefficient: t < 1 needs c >= ln 2, t > 1 needs c <= ln 2.
FANNES_ETA = EtaModel("tlog", math.log(2.0))


@dataclass(frozen=True)
class AuditSuite:
    measure: str
    additivity: object
    permutation: object
    continuity: ContinuityReport
    witness: object
    claims: dict

    @property
    def claims_pass(self):
        ok = True
        if self.claims["additive"]:
            ok &= self.additivity.passed
        if self.claims["permutation_invariant"]:
            ok &= self.permutation.passed
        if self.claims["nonconstant"]:
            ok &= self.witness is not None
        return bool(ok)

    def format(self):
        def line(label, claimed, passed, detail):
            status = "pass" if passed else "FAIL"
            tag = "claimed" if claimed else "not claimed"
            return f"  {label:<24} {status:<5} ({tag}) {detail}"

        add, perm, cont, wit = self.additivity, self.permutation, self.continuity, self.witness
        out = [f"measure: {self.measure}"]
        out.append("[additivity]")
        out.append(line("max residual", self.claims["additive"], add.passed,
                        f"{add.max_residual:.6e} (tol {add.tolerance:.0e}, worst pair {add.worst_index})"))
        out.append(f"[{perm.name}]")
        out.append(line("max residual", self.claims["permutation_invariant"], perm.passed,
                        f"{perm.max_residual:.6e} (tol {perm.tolerance:.0e})"))
        out.append("[continuity K=1 alpha=1 eta=ln2*t*log2(1/t)]")
        out.append(line("max violation", False, cont.passed,
                        f"{cont.max_violation:.6e} (tol {cont.tolerance:.0e}, worst pair {cont.worst_index})"))
        out.append("[nonconstancy]")
        detail = "no witness" if wit is None else f"c = {wit.c:.12g} (d = {wit.d})"
        out.append(line("witness", self.claims["nonconstant"], wit is not None, detail))
        out.append(f"result: {'all claimed properties hold' if self.claims_pass else 'a claimed property FAILS'}")
        return "\n".join(out) + "\n"


def run_audits(f, seed=0, samples=8, params=None):
    """Seeded audit battery for a measure: additivity, permutations, continuity, witness.

    Non-partition-aware measures are audited on qubit states (plus one
    qubit-qutrit pair); partition-aware ones on two-qubit states split
    between two parties, with the per-party cyclic shift on two copies.
    The pairs ``(I/2, I/2)`` and ``(|0><0|, I/2)`` are always included.
    """
    params = params or ContinuityParams(1.0, 1.0, FANNES_ETA)
    rng = np.random.default_rng(seed)

    def draw(d, shape=None):
        rank = int(rng.integers(1, d + 1))
        return sample_random_state(d, rank=rank, seed=int(rng.integers(2**63)), shape=shape)

    if f.partition_aware:
        part = Partition((2, 2), (0, 1))
        mixed = DensityMatrix.maximally_mixed(4, (2, 2))
        pure0 = DensityMatrix.from_diag([1, 0, 0, 0], (2, 2))
        states = [draw(4, (2, 2)) for _ in range(2 * samples)]
        pairs = [(mixed, mixed), (pure0, mixed)] + list(zip(states[::2], states[1::2]))
        partitions = [(part, part)] * len(pairs)
        add = audit_additivity(f, pairs, partitions)
        perm = audit_cyclic_invariance(f, draw(16, (2, 2, 2, 2)), part, 2)
        cont = audit_continuity(f, pairs, params, partitions)
        witness = find_nonconstancy_witness(f, 4, samples, seed, partition=part)
    else:
        mixed = DensityMatrix.maximally_mixed(2)
        pure0 = DensityMatrix.from_diag([1, 0])
        states = [draw(2) for _ in range(2 * samples)]
        pairs = [(mixed, mixed), (pure0, mixed)] + list(zip(states[::2], states[1::2]))
        add = audit_additivity(f, pairs + [(draw(2), draw(3))])
        perm = audit_permutation_invariance(f, draw(8, (2, 2, 2)))
        cont = audit_continuity(f, pairs, params)
        witness = find_nonconstancy_witness(f, 2, samples, seed)
    return AuditSuite(f.name, add, perm, cont, witness, f.claims)
