"""Catalyst states and the cyclic-shift embezzling protocol.

The catalyst on ``n`` registers is the uniform mixture

    Gamma  = 1/(n-1) * sum_{r=1}^{n-1} rho^{(x) r} (x) sigma^{(x) n-r}

and rotating ``rho (x) Gamma`` by one register gives ``sigma (x) Gamma'``,
where ``Gamma'`` is the same sum over ``r = 2..n``.  Both are stored as
:class:`WordMixture` objects: a weight per word over the alphabet
``{0: rho, 1: sigma}``, with Kronecker products only formed in
:meth:`WordMixture.densify`.

Trace norms of ``Gamma - Gamma'`` come either from the dense matrix or, for
commuting ``rho`` and ``sigma``, from a sum over type classes of diagonal
indices evaluated in log space.
"""
from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np
from scipy.special import gammaln, logsumexp

from .linalg import hermitian_eigh, offdiag_norm, trace_norm
from .states import DensityMatrix, Permutation, permute_registers

__all__ = [
    "DENSE_CAP",
    "WordMixture",
    "to_runs",
    "from_runs",
    "ProtocolResult",
    "DenseCapError",
    "NonCommutingError",
    "ProvenanceError",
    "build_catalyst",
    "shift_catalyst",
    "catalyst_difference",
    "apply_protocol",
    "catalyst_trace_distance",
    "catalyst_trace_norm_dense",
    "catalyst_trace_norm_typeclass",
    "typeclass_trace_norm",
    "simultaneous_spectra",
    "compositions",
    "copy_rotation",
    "per_party_cyclic_shift",
]

#: Largest total dimension the dense paths will materialise.
DENSE_CAP = 4096

_COMMUTE_TOL = 1e-10
_GENERIC_MIX = 0.37


class DenseCapError(ValueError):
    pass


class NonCommutingError(ValueError):
    pass


class ProvenanceError(ValueError):
    pass


def _same_state(a, b):
    return a is b or (a.shape == b.shape and np.array_equal(a.entries, b.entries))


def to_runs(word):
    """Run-length encode a word: ``(0, 0, 1) -> ((0, 2), (1, 1))``."""
    runs = []
    for s in word:
        s = int(s)
        if runs and runs[-1][0] == s:
            runs[-1][1] += 1
        else:
            runs.append([s, 1])
    return tuple((s, c) for s, c in runs)


def _merge_runs(runs):
    out = []
    for s, c in runs:
        if c <= 0:
            continue
        if out and out[-1][0] == s:
            out[-1][1] += c
        else:
            out.append([s, c])
    return tuple((s, c) for s, c in out)


def from_runs(runs):
    return tuple(s for s, c in runs for _ in range(c))


@dataclass(frozen=True, eq=False)
class WordMixture:
    """Weighted sum of tensor words over a small alphabet of base states.

    ``runs`` holds ``(weight, word)`` pairs where ``word`` is a run-length
    encoded sequence of indices into ``bases``, e.g. ``((0, 2), (1, 1))``
    for ``rho (x) rho (x) sigma``; :attr:`terms` spells the words out.
    Run-length storage means a catalyst on ``n`` registers costs ``O(n)`` memory rather than
    ``O(n^2)``.  Weights may be negative (differences of states); for a
    state they are positive and sum to one.
    """

    bases: tuple
    runs: tuple

    def __post_init__(self):
        bases = tuple(self.bases)
        if not bases:
            raise ValueError("a word mixture needs at least one base state")
        if any(b.dim != bases[0].dim for b in bases):
            raise ValueError("all base states must share one dimension")
        if any(b.shape != bases[0].shape for b in bases):
            raise ValueError("all base states must share one register shape")
        runs = tuple((float(w), _merge_runs((int(s), int(c)) for s, c in r)) for w, r in self.runs)
        lengths = {sum(c for _, c in r) for _, r in runs}
        if len(lengths) > 1:
            raise ValueError(f"words have different lengths {sorted(lengths)}")
        if any(not 0 <= s < len(bases) for _, r in runs for s, _ in r):
            raise ValueError("word symbol out of range of the base alphabet")
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "runs", runs)

    @classmethod
    def from_words(cls, bases, terms):
        return cls(bases, tuple((w, to_runs(word)) for w, word in terms))

    @property
    def terms(self):
        """``(weight, word)`` pairs with words spelled out."""
        return tuple((w, from_runs(r)) for w, r in self.runs)

    @property
    def weights(self):
        return tuple(w for w, _ in self.runs)

    @property
    def length(self):
        return sum(c for _, c in self.runs[0][1]) if self.runs else 0

    @property
    def base_dim(self):
        return self.bases[0].dim

    @property
    def dim(self):
        return self.base_dim ** self.length

    @property
    def shape(self):
        return self.bases[0].shape * self.length

    @property
    def total_weight(self):
        return float(sum(self.weights))

    def is_state(self, tol=1e-12):
        return all(w > 0 for w in self.weights) and abs(self.total_weight - 1.0) <= tol

    def prepend(self, symbol):
        """``bases[symbol] (x) self``."""
        return WordMixture(self.bases, tuple((w, ((symbol, 1),) + r) for w, r in self.runs))

    def rotate(self, shift=1):
        """Move register ``i`` to ``i + shift (mod L)`` in every word."""
        L = self.length
        if L == 0 or shift % L == 0:
            return self
        shift %= L
        return WordMixture(self.bases, tuple((w, _rotate_runs(r, shift)) for w, r in self.runs))

    def canonical(self):
        """Merge identical base states and identical words; drop zero weights.

        Terms come out sorted by word, so two mixtures describe the same
        operator term for term iff their canonical terms are equal.
        """
        keep = []
        relabel = []
        for b in self.bases:
            for j, k in enumerate(keep):
                if _same_state(b, k):
                    relabel.append(j)
                    break
            else:
                relabel.append(len(keep))
                keep.append(b)
        acc = {}
        for w, r in self.runs:
            key = _merge_runs((relabel[s], c) for s, c in r)
            acc[key] = acc.get(key, 0.0) + w
        runs = tuple((w, r) for r, w in sorted(acc.items()) if w != 0.0)
        return WordMixture(tuple(keep), runs)

    def __sub__(self, other):
        if len(self.bases) != len(other.bases) or not all(
            _same_state(a, b) for a, b in zip(self.bases, other.bases)
        ):
            raise ProvenanceError("mixtures are built on different base states")
        if self.runs and other.runs and self.length != other.length:
            raise ValueError("mixtures have different word lengths")
        negated = tuple((-w, r) for w, r in other.runs)
        return WordMixture(self.bases, self.runs + negated).canonical()

    def densify(self):
        """The mixture as a dense :class:`DensityMatrix` of side ``d**L``."""
        return DensityMatrix(self.dense_array(), self.shape)

    def dense_array(self):
        if not self.runs:
            return np.zeros((self.dim, self.dim))
        complex_ = any(np.iscomplexobj(b.entries) for b in self.bases)
        out = np.zeros((self.dim, self.dim), dtype=complex if complex_ else float)
        mats = [b.entries for b in self.bases]
        for w, word in self.terms:
            k = reduce(np.kron, (mats[s] for s in word))
            k *= w
            out += k
            del k
        return out


def _rotate_runs(runs, shift):
    """Right rotation by ``shift`` symbols, working on runs."""
    tail = []
    rest = list(runs)
    need = shift
    while need:
        s, c = rest.pop()
        take = min(c, need)
        tail.insert(0, (s, take))
        if c > take:
            rest.append((s, c - take))
        need -= take
    return _merge_runs(tail + rest)


@dataclass(frozen=True)
class ProtocolResult:
    output: WordMixture
    achieved_error: float
    bound: float
    exactness_residual: float
    word_exact: bool
    dense_checked: bool

    @property
    def ok(self):
        return (
            self.word_exact
            and self.achieved_error <= self.bound + 1e-9
            and self.exactness_residual <= 1e-10
        )


def _check_pair(rho, sigma):
    if rho.dim != sigma.dim:
        raise ValueError(f"rho and sigma differ in dimension ({rho.dim} vs {sigma.dim})")
    if rho.shape != sigma.shape:
        raise ValueError(f"rho and sigma differ in register shape ({rho.shape} vs {sigma.shape})")


def _catalyst_runs(n, first):
    return tuple(_merge_runs(((0, r), (1, n - r))) for r in range(first, first + n - 1))


def build_catalyst(rho, sigma, n):
    """Catalyst ``Gamma`` on ``n >= 2`` registers as a :class:`WordMixture`."""
    if int(n) != n or n < 2:
        raise ValueError("n must be >= 2")
    n = int(n)
    _check_pair(rho, sigma)
    w = 1.0 / (n - 1)
    return WordMixture((rho, sigma), tuple((w, r) for r in _catalyst_runs(n, 1)))


def _catalyst_index(mix):
    """Return ``(n, first)`` for a catalyst-shaped mixture, else raise."""
    if len(mix.bases) != 2 or not mix.runs:
        raise ProvenanceError("not a catalyst: expects bases (rho, sigma) and at least one term")
    n = mix.length
    if n < 2 or len(mix.runs) != n - 1:
        raise ProvenanceError("not a catalyst: wrong number of terms for the word length")
    w = 1.0 / (n - 1)
    runs = tuple(r for _, r in mix.runs)
    for first in (1, 2):
        if runs == _catalyst_runs(n, first):
            if any(abs(t - w) > 1e-15 for t in mix.weights):
                raise ProvenanceError("not a catalyst: weights are not uniform 1/(n-1)")
            return n, first
    raise ProvenanceError("not a catalyst: words are not of the form rho^r sigma^(n-r)")


def shift_catalyst(gamma):
    """``Gamma'``: every word ``rho^r sigma^(n-r)`` becomes ``rho^(r+1) sigma^(n-r-1)``."""
    n, first = _catalyst_index(gamma)
    if first != 1:
        raise ProvenanceError("shift_catalyst expects Gamma as produced by build_catalyst")
    runs = _catalyst_runs(n, 2)
    return WordMixture(gamma.bases, tuple((w, r) for w, r in zip(gamma.weights, runs)))


def _check_provenance(gamma, gamma_p):
    n, first = _catalyst_index(gamma)
    n2, first2 = _catalyst_index(gamma_p)
    if (first, first2) != (1, 2) or n != n2:
        raise ProvenanceError("expected Gamma and Gamma' for the same n")
    if not all(_same_state(a, b) for a, b in zip(gamma.bases, gamma_p.bases)):
        raise ProvenanceError("Gamma and Gamma' are built from different (rho, sigma)")
    return n


def catalyst_difference(gamma, gamma_p):
    """``Gamma - Gamma'`` as a signed mixture.

    The telescoping sum leaves ``+1/(n-1)`` on ``rho sigma^(n-1)`` and
    ``-1/(n-1)`` on ``rho^n``; when ``rho == sigma`` nothing is left.
    """
    _check_provenance(gamma, gamma_p)
    return gamma - gamma_p


def simultaneous_spectra(rho, sigma, tol=_COMMUTE_TOL):
    """Eigenvalue vectors ``(p, q)`` of commuting ``rho``, ``sigma`` in a shared basis.

    Raises :class:`NonCommutingError` when ``||rho sigma - sigma rho||_F > tol``.
    """
    a, b = rho.entries, sigma.entries
    comm = float(np.linalg.norm(a @ b - b @ a))
    if comm > tol:
        raise NonCommutingError(f"rho and sigma do not commute (||[rho, sigma]||_F = {comm:.3e})")
    if offdiag_norm(a) == 0.0 and offdiag_norm(b) == 0.0:
        return np.real(np.diag(a)).astype(float), np.real(np.diag(b)).astype(float)

    _, v = hermitian_eigh(a + _GENERIC_MIX * b, vectors=True)
    ra = v.conj().T @ a @ v
    rb = v.conj().T @ b @ v
    if offdiag_norm(ra) > 1e-9 or offdiag_norm(rb) > 1e-9:
        # rho + c*sigma was degenerate: refine sigma inside rho's eigenspaces
        w, v = hermitian_eigh(a, vectors=True)
        blocks = np.split(np.arange(len(w)), np.nonzero(np.abs(np.diff(w)) > 1e-8)[0] + 1)
        for idx in blocks:
            vb = v[:, idx]
            _, u = hermitian_eigh(vb.conj().T @ b @ vb, vectors=True)
            v[:, idx] = vb @ u
        ra = v.conj().T @ a @ v
        rb = v.conj().T @ b @ v
    return np.real(np.diag(ra)).copy(), np.real(np.diag(rb)).copy()


def compositions(total, parts):
    """All ``parts``-tuples of non-negative integers summing to ``total``.

    Rows are in ascending lexicographic order.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    if parts == 2:
        first = np.arange(total + 1, dtype=np.int64)
        return np.stack([first, total - first], axis=1)
    rows = []
    for bars in combinations(range(total + parts - 1), parts - 1):
        edges = (-1,) + bars + (total + parts - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(parts)])
    return np.array(rows, dtype=np.int64)


def _log_weights(counts, probs):
    with np.errstate(divide="ignore"):
        logs = np.log(probs)
    terms = np.where(counts > 0, counts * np.where(np.isfinite(logs), logs, 0.0), 0.0)
    dead = np.any((counts > 0) & ~np.isfinite(logs), axis=1)
    out = terms.sum(axis=1)
    out[dead] = -np.inf
    return out


def _log_abs_diff(x, y):
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    out = np.full(hi.shape, -np.inf)
    live = np.isfinite(hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[live] = hi[live] + np.log1p(-np.exp(lo[live] - hi[live]))
    return out


def typeclass_trace_norm(p, q, n, max_classes=10_000_000):
    """``|| rho (x) sigma^(n-1) - rho^n ||_1`` for ``rho = diag(p)``, ``sigma = diag(q)``.

    Diagonal entry ``(b_1, ..., b_n)`` equals ``p[b_1] * (prod q[b_i] - prod p[b_i])``
    over ``i >= 2``, which depends on ``b_2..b_n`` only through the symbol
    counts.  Each count vector contributes ``multinomial * |q^c - p^c|``,
    summed in log space.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = p.size
    m = n - 1
    n_classes = int(round(np.exp(gammaln(m + d) - gammaln(d) - gammaln(m + 1))))
    if n_classes > max_classes:
        raise ValueError(f"{n_classes} type classes exceed max_classes={max_classes}")
    counts = compositions(m, d)
    log_mult = gammaln(m + 1) - gammaln(counts + 1).sum(axis=1)
    terms = log_mult + _log_abs_diff(_log_weights(counts, q), _log_weights(counts, p))
    inner = float(np.exp(logsumexp(terms))) if np.any(np.isfinite(terms)) else 0.0
    return float(sum(pb * inner for pb in p if pb > 0))


def catalyst_trace_norm_typeclass(gamma, gamma_p):
    n = _check_provenance(gamma, gamma_p)
    p, q = simultaneous_spectra(*gamma.bases)
    return typeclass_trace_norm(p, q, n) / (n - 1)


def catalyst_trace_norm_dense(gamma, gamma_p, dense_cap=DENSE_CAP):
    _check_provenance(gamma, gamma_p)
    if gamma.dim > dense_cap:
        raise DenseCapError(f"dense path needs dimension {gamma.dim} > dense_cap={dense_cap}")
    diff = gamma.dense_array()
    diff -= gamma_p.dense_array()
    return trace_norm(diff)


def catalyst_trace_distance(gamma, gamma_p, method="auto", dense_cap=DENSE_CAP):
    """``||Gamma - Gamma'||_1``.

    ``method`` is ``"dense"``, ``"commuting-typeclass"`` or ``"auto"``
    (type classes when ``rho`` and ``sigma`` commute, dense otherwise).
    """
    if method == "dense":
        return catalyst_trace_norm_dense(gamma, gamma_p, dense_cap)
    if method == "commuting-typeclass":
        return catalyst_trace_norm_typeclass(gamma, gamma_p)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        return catalyst_trace_norm_typeclass(gamma, gamma_p)
    except NonCommutingError:
        return catalyst_trace_norm_dense(gamma, gamma_p, dense_cap)


def copy_rotation(n_copies, registers_per_copy=1, parties=None, selected=None):
    """Permutation sending copy ``c`` to copy ``c + 1 (mod n_copies)``.

    With ``parties`` (one label per register of a copy) and ``selected``,
    only registers whose party is in ``selected`` move.
    """
    k = registers_per_copy
    image = []
    for c in range(n_copies):
        for t in range(k):
            moves = selected is None or parties[t] in selected
            image.append(((c + 1) % n_copies) * k + t if moves else c * k + t)
    return Permutation(tuple(image))


def per_party_cyclic_shift(state, partition, n_copies, parties=None):
    """Cycle each party's registers across ``n_copies`` copies of ``partition``.

    ``state`` must have shape ``partition.shape * n_copies`` (registers
    grouped by copy).  ``parties`` restricts the shift to those parties;
    the default shifts all of them, which is the composed cyclic permutation.
    """
    if n_copies < 1:
        raise ValueError("n_copies must be >= 1")
    if state.shape != partition.shape * n_copies:
        raise ValueError(
            f"state shape {state.shape} is not {n_copies} copies of partition shape {partition.shape}"
        )
    selected = None if parties is None else set(parties)
    perm = copy_rotation(n_copies, len(partition.shape), partition.parties, selected)
    return permute_registers(state, perm)


def apply_protocol(rho, sigma, n, dense_cap=DENSE_CAP, method="auto"):
    """Run the cyclic shift on ``rho (x) Gamma`` and check it lands on ``sigma (x) Gamma'``.

    The rotation is applied to the words of the mixture.  When
    ``d**(n+1) <= dense_cap`` the same rotation is also applied to the dense
    matrix with :func:`permute_registers` and compared with the dense
    target in trace norm.
    """
    gamma = build_catalyst(rho, sigma, n)
    gamma_p = shift_catalyst(gamma)
    joint = gamma.prepend(0)
    rotated = joint.rotate(1)
    target = gamma_p.prepend(1)
    word_exact = rotated.canonical().runs == target.canonical().runs

    residual = 0.0
    dense_checked = False
    if joint.dim <= dense_cap:
        perm = copy_rotation(n + 1, len(rho.shape))
        moved = permute_registers(joint.densify(), perm)
        residual = trace_norm(moved.entries - target.dense_array())
        dense_checked = True

    return ProtocolResult(
        output=rotated,
        achieved_error=catalyst_trace_distance(gamma, gamma_p, method=method, dense_cap=dense_cap),
        bound=2.0 / (n - 1),
        exactness_residual=residual,
        word_exact=word_exact,
        dense_checked=dense_checked,
    )
