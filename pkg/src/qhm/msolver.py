"""Invariant measures and the energy supremum constant of a finite space.

The supremum M of the energy I(mu) over signed measures of total mass 1 is
decided in three steps: a non-quasihypermetric space has M infinite (the
spectral witness has positive energy); a quasihypermetric space carrying a
mass-zero measure whose potential is a nonzero constant also has M infinite;
otherwise M is finite, attained by a mass-1 measure with constant potential,
and both come out of one bordered linear system

    [ dist  -1 ] [w]   [0]
    [ 1'     0 ] [c] = [1]

solved by a rank-revealing (SVD) factorization: the constant potential value
c equals M and w is a maximizing measure. An independent projected-ascent
oracle cross-checks finite values and detects divergence without touching the
linear-algebra route.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import (
    ASCENT_BLOWUP,
    ASCENT_CONVERGED,
    ascent_kernel,
)
from .classify import (
    DEFAULT_TOL,
    Verdict,
    classify,
    default_flatness_tol,
    kernel_flat_values,
)
from .energy import (
    MASS_TOL,
    SignedMeasure,
    energy,
    inner_extended,
    measure,
    potential,
    seminorm_zero,
)
from .errors import (
    ChainMismatchError,
    InconsistencyError,
    InvalidInputError,
    NotInvariantInputError,
    SolverBreakdown,
)
from .spaces import FiniteMetricSpace, GlueSpec, diameter, glue


@dataclass(frozen=True, eq=False)
class InvariantSolve:
    """A mass-1 measure with constant potential, and how good the solve is.

    residual is the sup-norm deviation of the potential from the constant;
    unique is False when the bordered system is singular (the solution is
    then the minimum-euclidean-norm representative).
    """

    measure: SignedMeasure
    value: float
    residual: float
    unique: bool


@dataclass(frozen=True, eq=False)
class MDecision:
    """Finite/Infinite decision for the energy supremum constant."""

    status: str  # "finite" | "infinite"
    value: float | None = None
    maximal_measure: SignedMeasure | None = None
    reason: str | None = None  # "NotQuasihypermetric" | "NonzeroFlatKernel"
    witness: SignedMeasure | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.status == "finite"


def invariant_measure(space: FiniteMetricSpace,
                      tol: float = DEFAULT_TOL) -> InvariantSolve | None:
    """Solve the bordered system for a constant-potential mass-1 measure.

    Returns None when the system is inconsistent beyond tol (no such measure
    exists). Singular-but-consistent systems yield the minimum-norm solution
    with unique=False.
    """
    n = space.n
    k = np.zeros((n + 1, n + 1))
    k[:n, :n] = space.dist
    k[:n, n] = -1.0
    k[n, :n] = 1.0
    b = np.zeros(n + 1)
    b[n] = 1.0
    try:
        z, _, rank, _ = np.linalg.lstsq(k, b, rcond=tol)
    except np.linalg.LinAlgError as exc:
        raise SolverBreakdown(f"least-squares solve failed: {exc}") from exc
    w, c = z[:n], float(z[n])
    scale = max(1.0, diameter(space))
    sys_residual = float(np.abs(k @ z - b).max())
    if sys_residual > tol * scale:
        return None
    mu = measure(space, w)
    residual = float(np.abs(potential(space, mu) - c).max())
    return InvariantSolve(measure=mu, value=c, residual=residual,
                          unique=bool(rank == n + 1))


def m_constant(space: FiniteMetricSpace, tol: float = DEFAULT_TOL,
               flatness_tol: float | None = None) -> MDecision:
    """Decide whether the energy supremum constant is finite; compute it if so.

    Procedure: (a) classify; a NotQuasihypermetric verdict is Infinite with
    the spectral witness. (b) On NonStrict, any degenerate direction whose
    constant potential value is nonzero forces Infinite with that direction
    as witness. (c) Otherwise the bordered solve must succeed (theory
    guarantees existence for finite quasihypermetric spaces); failure raises
    InconsistencyError since it can only mean misconfigured tolerances.
    """
    if flatness_tol is None:
        flatness_tol = default_flatness_tol(space)
    cls = classify(space, tol)
    diagnostics = {"margin": cls.margin, "classify_tol": cls.tol_used,
                   "verdict": cls.verdict.value}

    if cls.verdict is Verdict.NOT_QUASIHYPERMETRIC:
        diagnostics["witness_energy"] = energy(space, cls.witness)
        return MDecision(status="infinite", reason="NotQuasihypermetric",
                         witness=cls.witness, diagnostics=diagnostics)

    if cls.verdict is Verdict.NON_STRICT:
        flats = kernel_flat_values(space, cls, flatness_tol=flatness_tol)
        diagnostics["kernel_flat_values"] = [f.value for f in flats]
        for f in flats:
            if abs(f.value) > flatness_tol:
                diagnostics["flat_value"] = f.value
                return MDecision(status="infinite", reason="NonzeroFlatKernel",
                                 witness=f.vector, diagnostics=diagnostics)

    solve = invariant_measure(space, tol)
    if solve is None:
        raise InconsistencyError(
            "no constant-potential mass-1 measure found on a space that the "
            "classification declares finite; tolerances are misconfigured",
            diagnostics=diagnostics)
    diagnostics["flatness"] = solve.residual
    diagnostics["unique"] = solve.unique
    diagnostics["mass_error"] = abs(solve.measure.mass - 1.0)
    if solve.residual > flatness_tol or diagnostics["mass_error"] > MASS_TOL:
        raise InconsistencyError(
            f"bordered solve violates its own contract (flatness "
            f"{solve.residual}, mass error {diagnostics['mass_error']})",
            diagnostics=diagnostics)
    return MDecision(status="finite", value=solve.value,
                     maximal_measure=solve.measure, diagnostics=diagnostics)


@dataclass(frozen=True)
class GluePrediction:
    """Closed-form prediction for the constant of a glued space."""

    kind: str  # "finite" | "infinite" | "boundary"
    value: float | None = None


def glued_m_predict(m_x: float, m_y: float, c: float,
                    tol: float = DEFAULT_TOL) -> GluePrediction:
    """Predict the glued-space constant from component constants and c.

    2c > m_x + m_y gives a finite value (c^2 - m_x m_y)/(2c - m_x - m_y);
    2c < m_x + m_y means the glued space is not quasihypermetric (infinite).
    On the boundary 2c = m_x + m_y the constant stays finite (equal to the
    shared component value) only when m_x = m_y; otherwise a mass-zero
    measure with nonzero constant potential exists and the constant is
    infinite. Boundary detection uses `tol` relative to the magnitudes.
    """
    for v, what in ((m_x, "m_x"), (m_y, "m_y"), (c, "c")):
        if not math.isfinite(v):
            raise InvalidInputError(f"{what} must be finite, got {v!r}")
    if m_x < 0.0 or m_y < 0.0:
        raise InvalidInputError("component constants must be nonnegative")
    if c <= 0.0:
        raise InvalidInputError(f"cross-distance must be positive, got {c}")
    s = m_x + m_y
    gap = 2.0 * c - s
    eps = tol * max(1.0, s, 2.0 * c)
    if gap > eps:
        return GluePrediction(kind="finite", value=(c * c - m_x * m_y) / gap)
    if gap < -eps:
        return GluePrediction(kind="infinite")
    if abs(m_x - m_y) <= eps:
        return GluePrediction(kind="boundary", value=m_x)
    return GluePrediction(kind="infinite")


def glued_invariant(mu1: SignedMeasure, mu2: SignedMeasure, m_x: float,
                    m_y: float, c: float,
                    flatness_tol: float | None = None) -> SignedMeasure:
    """Combine component invariant measures into one on the glued space.

    Given mass-1 measures with constant potentials m_x, m_y on their spaces,
    the weighted concatenation (m_y - c) mu1 ++ (m_x - c) mu2 has constant
    potential m_x m_y - c^2 on the glued space and mass m_x + m_y - 2c.
    """
    for mu, m, what in ((mu1, m_x, "first"), (mu2, m_y, "second")):
        ft = default_flatness_tol(mu.space) if flatness_tol is None else flatness_tol
        dev = float(np.abs(potential(mu.space, mu) - m).max())
        if dev > ft:
            raise NotInvariantInputError(
                f"{what} measure is not invariant with value {m} "
                f"(potential deviates by {dev} > {ft})")
    z = glue(GlueSpec(mu1.space, mu2.space, c))
    w = np.concatenate([(m_y - c) * mu1.weights, (m_x - c) * mu2.weights])
    return measure(z, w)


@dataclass(frozen=True, eq=False)
class AscentTrace:
    """Monotone-best trace of the projected gradient ascent.

    Rows are (iteration, best value so far, best measure so far) sampled at a
    fixed stride plus the final iteration. status is "converged" (projected
    gradient below grad_tol), "blowup" (best value crossed the divergence
    threshold), or "maxiter".
    """

    iterations: np.ndarray
    best_values: np.ndarray
    best_measures: np.ndarray
    best_value: float
    best_measure: SignedMeasure
    status: str
    iterations_run: int

    @property
    def blown_up(self) -> bool:
        return self.status == "blowup"


def ascent_step_default(space: FiniteMetricSpace) -> float:
    """Fixed ascent step 1/(2 rho(dist)); guarantees monotone ascent for the
    concave restricted problem, no line search needed."""
    if space.n == 1:
        return 1.0
    rho = float(np.abs(np.linalg.eigvalsh(space.dist)).max())
    return 1.0 / (2.0 * rho) if rho > 0 else 1.0


def ascent_oracle(space: FiniteMetricSpace, iterations: int = 100_000,
                  step: float | None = None, seed: int = 0,
                  blowup: float | None = None, grad_tol: float = 1e-10,
                  record_stride: int | None = None) -> AscentTrace:
    """Projected gradient ascent on I(mu) over the mass-1 affine slice.

    Starts from the uniform measure plus a seeded mass-zero perturbation and
    iterates mu += step * P(2 potential(mu)). For quasihypermetric spaces
    with a finite constant the best value climbs to it (the restricted
    problem is concave); when the constant is infinite the trace grows
    without bound, reported via the blowup threshold (default 1e6 times the
    diameter). Purely iterative: shares nothing with the bordered solve, so
    it serves as an independent check.
    """
    if iterations < 1:
        raise InvalidInputError(f"need at least 1 iteration, got {iterations}")
    n = space.n
    if step is None:
        step = ascent_step_default(space)
    if blowup is None:
        blowup = max(1.0, 1e6 * diameter(space))
    if record_stride is None:
        record_stride = max(1, iterations // 256)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n)
    z -= z.mean()
    w0 = np.full(n, 1.0 / n) + 1e-3 * z

    rec_it, rec_val, rec_w, best, best_w, status_code, last_it = ascent_kernel(
        np.ascontiguousarray(space.dist), w0, int(iterations), float(step),
        float(blowup), float(grad_tol), int(record_stride))
    status = {ASCENT_CONVERGED: "converged", ASCENT_BLOWUP: "blowup"}.get(
        int(status_code), "maxiter")
    return AscentTrace(iterations=rec_it, best_values=rec_val,
                       best_measures=rec_w, best_value=float(best),
                       best_measure=measure(space, best_w), status=status,
                       iterations_run=int(last_it))


@dataclass(frozen=True)
class MaximalityReport:
    """Evidence that a mass-1 measure attains the supremum.

    flatness: sup-norm deviation of its potential from m_value. dominance
    violations count seeded random mass-1 measures whose energy exceeds
    m_value beyond tolerance (must be 0 for a true maximizer); worst_excess
    is the largest such excess (negative when every trial stayed below).
    norm_squared comes from the extended inner product and must be 1.
    """

    flatness: float
    dominance_violations: int
    worst_excess: float
    norm_squared: float
    identity_gap: float
    trials: int


def verify_maximal(space: FiniteMetricSpace, mu: SignedMeasure, m_value: float,
                   trials: int = 1000, seed: int = 0,
                   tol: float = DEFAULT_TOL) -> MaximalityReport:
    """Check flatness, random dominance, and the norm identity for a
    candidate maximal measure."""
    if abs(mu.mass - 1.0) > MASS_TOL:
        raise InvalidInputError(f"candidate must have mass 1, got {mu.mass}")
    flatness = float(np.abs(potential(space, mu) - m_value).max())
    rng = np.random.default_rng(seed)
    n = space.n
    base = np.full(n, 1.0 / n)
    violations = 0
    worst = -math.inf
    for _ in range(trials):
        z = rng.standard_normal(n)
        z -= z.mean()
        nu = measure(space, base + z)
        excess = energy(space, nu) - m_value
        worst = max(worst, excess)
        if excess > tol:
            violations += 1
    norm_sq = inner_extended(space, m_value, mu, mu)
    return MaximalityReport(flatness=flatness, dominance_violations=violations,
                            worst_excess=worst, norm_squared=norm_sq,
                            identity_gap=abs(norm_sq - 1.0), trials=trials)


@dataclass(frozen=True)
class SequenceRow:
    """One chain element of a refinement diagnostic table."""

    k: int
    n_k: int
    i_mu: float
    flatness: float
    seminorm_step: float | None


def sequence_rows_csv(rows) -> str:
    """Fixed CSV rendering of a diagnostic table (header k,n_k,i_mu,flatness,
    seminorm_step; blank step on the first row)."""
    lines = ["k,n_k,i_mu,flatness,seminorm_step"]
    for r in rows:
        step = "" if r.seminorm_step is None else format(r.seminorm_step, ".17g")
        lines.append(f"{r.k},{r.n_k},{format(r.i_mu, '.17g')},"
                     f"{format(r.flatness, '.17g')},{step}")
    return "\n".join(lines) + "\n"


def sequence_diagnostics(full_space: FiniteMetricSpace, index_chain,
                         measures, mass_tol: float = MASS_TOL) -> list[SequenceRow]:
    """Trend table for mass-1 measures on a nested chain of subspaces.

    index_chain[k] lists the points of the k-th subspace inside `full_space`
    (each list must be contained in the next); measures[k] is the mass-1
    measure on that subspace, given as a SignedMeasure or raw weights. Each
    measure is extended by zeros to the full space; the table reports its
    energy, the sup-inf spread of its potential over all full-space points,
    and the seminorm of the step from the previous chain element. The caller
    asserts monotonicity or boundedness; no rates are claimed.
    """
    chains = [list(ix) for ix in index_chain]
    if len(chains) != len(measures):
        raise ChainMismatchError(
            f"{len(chains)} index lists but {len(measures)} measures")
    if not chains:
        raise ChainMismatchError("empty chain")
    n = full_space.n
    prev: set | None = None
    extended = []
    for k, (ix, mu) in enumerate(zip(chains, measures)):
        if not ix:
            raise ChainMismatchError(f"chain element {k} selects no points")
        s = set(ix)
        if len(s) != len(ix):
            raise ChainMismatchError(f"chain element {k} repeats an index")
        if not all(0 <= i < n for i in ix):
            raise ChainMismatchError(f"chain element {k} has out-of-range indices")
        if prev is not None and not prev.issubset(s):
            raise ChainMismatchError(
                f"chain element {k} does not contain element {k - 1}")
        prev = s
        w = mu.weights if isinstance(mu, SignedMeasure) else np.asarray(mu, float)
        if w.shape != (len(ix),):
            raise ChainMismatchError(
                f"measure {k} has {w.shape} weights for {len(ix)} points")
        if abs(float(w.sum()) - 1.0) > mass_tol:
            raise ChainMismatchError(f"measure {k} has mass {w.sum()}, need 1")
        full = np.zeros(n)
        full[np.asarray(ix, dtype=np.intp)] = w
        extended.append(measure(full_space, full))

    rows = []
    for k, mu in enumerate(extended):
        pot = potential(full_space, mu)
        step = None
        if k > 0:
            dmu = measure(full_space, mu.weights - extended[k - 1].weights)
            step = seminorm_zero(full_space, dmu, mass_tol=2 * mass_tol)
        rows.append(SequenceRow(k=k, n_k=len(chains[k]),
                                i_mu=energy(full_space, mu),
                                flatness=float(pot.max() - pot.min()),
                                seminorm_step=step))
    return rows
