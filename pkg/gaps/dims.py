"""Face dimensions, quadratic deficiency and the gap vector.

Every dimension here is the rank of an evaluation table: degree-2 monomials
at sampled points of X (dim R_2), products of the linear forms vanishing on
Gamma (dim Sigma(Gamma) = dim S_2), or value and tangent functionals at the
points of Gamma (the conditions cutting out B, hence dim P(Gamma)).

Random evaluation can only under-estimate a rank, so sampled ranks are
repeated on fresh streams, each over the next baked-in prime in fp mode,
until two consecutive trials agree.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from math import comb

import numpy as np

from .exactalg import DenseMatrix, FieldContext, SeededSampler, kernel_basis, rank, stream_id
from .exceptions import GenericityFailure, InternalInconsistency, SpecError
from .variety import coordinate_table, jet_block, points_over, projective_dim, sample_points, variety_info

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 25
DEFAULT_TRIALS = 3


@dataclass(frozen=True)
class RankConfig:
    ctx: FieldContext
    seed: int = 0
    margin: int = DEFAULT_MARGIN
    max_trials: int = DEFAULT_TRIALS
    nested: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.margin < 1:
            raise ValueError(f"margin must be at least 1, got {self.margin}")
        if self.max_trials < 2:
            raise ValueError(f"max_trials must be at least 2, got {self.max_trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    def sampler(self, task, *keys):
        return SeededSampler(self.seed, stream_id(task, *keys))


@dataclass(frozen=True)
class FaceDims:
    """Dimensions attached to one generic set Gamma of size j."""
    j: int
    dim_sigma: int
    dim_P_formula: int
    dim_B: int
    secant_nondefective: bool
    eps_Y: int
    dim_IY2: int


@dataclass(frozen=True)
class GapReport:
    label: str
    m: int
    d: int
    c: int
    w: int
    dim_R2: int
    epsilon: int
    gap: tuple
    faces: tuple
    ctx: FieldContext
    seed: int
    trials: int
    margin: int
    nested: bool = False
    family: str = 'custom'
    family_params: tuple = ()
    anomalies: tuple = ()

    @property
    def dim_I2(self):
        """Quadrics in the ideal of X."""
        return comb(self.m + 2, 2) - self.dim_R2

    @property
    def options(self):
        return dict(self.family_params)

    def face(self, j):
        return self.faces[j - 1]


def _stable_rank(cfg, task, j, table_for):
    """Rank of a sampled table, repeated until two consecutive trials agree.

    ``table_for(sampler, ctx)`` builds the table of one trial. In prime-field
    mode trial t is taken over ``cfg.ctx.for_trial(t)``, so an unlucky prime
    can only make one trial disagree.
    """
    previous = None
    for trial in range(cfg.max_trials):
        ctx = cfg.ctx.for_trial(trial)
        table = table_for(cfg.sampler(task, j, trial), ctx)
        logger.debug("%s j=%d trial %d over %s: %dx%d table", task, j, trial, ctx, table.rows, table.cols)
        value = rank(table)
        if value == previous:
            return value
        if previous is not None:
            logger.warning("%s j=%d: rank %d after %d, drawing another sample", task, j, value, previous)
        previous = value
    raise GenericityFailure(f"{task} j={j}: no two consecutive trials agreed in {cfg.max_trials}")


def quadric_table(coords, ctx):
    """All products x_a x_b (a <= b) of each coordinate row, graded-lex columns."""
    ia, ib = np.triu_indices(coords.shape[1])
    return DenseMatrix(ctx, coords[:, ia] * coords[:, ib])


def dim_R2(variety, cfg):
    """Dimension of the degree-2 part of the coordinate ring of X."""
    count = comb(variety.ambient_dim + 2, 2) + cfg.margin

    def table(sampler, ctx):
        return quadric_table(coordinate_table(sample_points(variety, count, sampler, ctx)), ctx)

    return _stable_rank(cfg, 'dim-R2', 0, table)


def epsilon(variety, cfg, d=None, dim_r2=None):
    """Quadratic deficiency dim R_2 - (m+1)(d+1) + C(d+1, 2)."""
    m = variety.ambient_dim
    if d is None:
        d = projective_dim(variety, cfg.sampler('projective-dim'), cfg.ctx)
    if dim_r2 is None:
        dim_r2 = dim_R2(variety, cfg)
    value = dim_r2 - (m + 1) * (d + 1) + comb(d + 1, 2)
    if value < 0:
        raise InternalInconsistency(f"{variety}: negative quadratic deficiency {value} (dim R2 = {dim_r2})")
    return value


def vanishing_series(variety, gamma, ctx):
    """Basis of the linear forms vanishing at every point of Gamma."""
    m = variety.ambient_dim
    if len(gamma) > m:
        raise SpecError(f"{variety}: {len(gamma)} points span P^{m}, nothing vanishes on them")
    if not gamma:
        return DenseMatrix.identity(ctx, m + 1)
    series = kernel_basis(DenseMatrix(ctx, coordinate_table(gamma)))
    if series.rows != m + 1 - len(gamma):
        raise GenericityFailure(
            f"{variety}: {len(gamma)} points leave {series.rows} linear forms, expected {m + 1 - len(gamma)}"
        )
    return series


def dim_sigma(variety, gamma, cfg, series=None, j=None):
    """dim Sigma(Gamma), the degree-2 part of the coordinate ring of the projection.

    Trials over another prime re-derive the vanishing series there from the
    parameters of Gamma.
    """
    if series is None:
        series = vanishing_series(variety, gamma, cfg.ctx)
    j = len(gamma) if j is None else j
    k = series.rows
    count = comb(k + 1, 2) + cfg.margin
    ia, ib = np.triu_indices(k)

    def table(sampler, ctx):
        basis = series if ctx == cfg.ctx else vanishing_series(variety, points_over(variety, gamma, ctx), ctx)
        points = DenseMatrix(ctx, coordinate_table(sample_points(variety, count, sampler, ctx)))
        values = basis.times_transpose(points).entries
        return DenseMatrix(ctx, values[ia] * values[ib])

    return _stable_rank(cfg, 'sigma', j, table)


def conditions_matrix(variety, gamma, ctx):
    """Value and tangent functionals on quadrics at each point of Gamma.

    Per point: one row of degree-2 monomial values and one row per parameter
    holding d(x_a x_b o phi)/dt_i, so (n+2)|Gamma| rows and C(m+2, 2) columns.
    """
    ia, ib = np.triu_indices(variety.ambient_dim + 1)
    blocks = [np.empty((0, len(ia)), dtype=object)]
    for point in gamma:
        jet = jet_block(variety, point, ctx)
        x = np.array(jet.value_row, dtype=object)
        jac = np.array(jet.jacobian_rows, dtype=object)
        blocks.append((x[ia] * x[ib])[np.newaxis, :])
        blocks.append(jac[:, ia] * x[ib] + jac[:, ib] * x[ia])
    return DenseMatrix(ctx, np.vstack(blocks))


def dim_P(variety, gamma, cfg, d=None, dim_r2=None):
    """(dim B, secant non-defective) for the forms double at Gamma."""
    m = variety.ambient_dim
    if d is None:
        d = projective_dim(variety, cfg.sampler('projective-dim'), cfg.ctx)
    if len(gamma) > m - d:
        raise SpecError(f"{variety}: |Gamma| = {len(gamma)} exceeds the codimension {m - d}")
    if dim_r2 is None:
        dim_r2 = dim_R2(variety, cfg)
    if not gamma:
        return dim_r2, True
    conditions = rank(conditions_matrix(variety, gamma, cfg.ctx))
    return dim_r2 - conditions, conditions == len(gamma) * (d + 1)


def independence_tangent_check(variety, gamma, cfg, d=None):
    """Tangent half of independence: T_pX meets the span of Gamma only in p.

    Gamma must also impose independent linear conditions; a repeated point
    fails here.
    """
    m = variety.ambient_dim
    ctx = cfg.ctx
    if d is None:
        d = projective_dim(variety, cfg.sampler('projective-dim'), ctx)
    series = kernel_basis(DenseMatrix(ctx, coordinate_table(gamma))) if gamma else DenseMatrix.identity(ctx, m + 1)
    if series.rows != m + 1 - len(gamma):
        return False
    for point in gamma:
        jet = jet_block(variety, point, ctx)
        composite = series.times_transpose(DenseMatrix(ctx, jet.jacobian_rows))
        if composite.rank() != d:
            return False
    return True


def _independent_sample(variety, size, cfg, d, task):
    for attempt in range(cfg.max_trials):
        gamma = sample_points(variety, size, cfg.sampler(task, size, attempt), cfg.ctx)
        if independence_tangent_check(variety, gamma, cfg, d=d):
            return gamma
        logger.warning("%s %s of %d points: independence check failed on attempt %d, resampling",
                       variety, task, size, attempt)
    raise GenericityFailure(f"{variety}: no independent set of {size} points in {cfg.max_trials} attempts")


def generic_gamma(variety, j, cfg, d):
    """A sampled Gamma of size j passing the linear and tangent checks, with its series."""
    gamma = _independent_sample(variety, j, cfg, d, 'gamma')
    return gamma, vanishing_series(variety, gamma, cfg.ctx)


def generic_chain(variety, cfg, d, c):
    """One chain of c points whose prefixes serve as Gamma_1 .. Gamma_c.

    Every subset of an independent set is independent, so checking the
    whole chain once covers each prefix. A failing chain is redrawn whole.
    """
    return _independent_sample(variety, c, cfg, d, 'gamma-chain')


def epsilon_projection(variety, j, cfg, d=None, gamma=None, series=None):
    """(eps(Y_j), dim I(Y_j)_2) for the projection away from j generic points.

    ``gamma`` (with its ``series``) pins the points; otherwise they are sampled.
    """
    m = variety.ambient_dim
    if d is None:
        d = projective_dim(variety, cfg.sampler('projective-dim'), cfg.ctx)
    if not 1 <= j <= m - d:
        raise SpecError(f"{variety}: j = {j} outside 1..{m - d}")
    if gamma is None:
        gamma, series = generic_gamma(variety, j, cfg, d)
    sigma = dim_sigma(variety, gamma, cfg, series=series, j=j)
    eps_y = sigma - (m + 1 - j) * (d + 1) + comb(d + 1, 2)
    if eps_y < 0:
        raise InternalInconsistency(f"j={j}: negative deficiency {eps_y} of the projection (dim S2 = {sigma})")
    return eps_y, comb(m - j + 2, 2) - sigma


def face_dims(variety, j, cfg, d, dim_r2, chain=None):
    m = variety.ambient_dim
    if chain is None:
        gamma, series = generic_gamma(variety, j, cfg, d)
    else:
        gamma = chain[:j]
        series = vanishing_series(variety, gamma, cfg.ctx)
    eps_y, dim_iy2 = epsilon_projection(variety, j, cfg, d=d, gamma=gamma, series=series)
    # dim I(Y_j)_2 = C(m-j+2, 2) - dim Sigma(Gamma)
    sigma = comb(m - j + 2, 2) - dim_iy2
    dim_b, nondefective = dim_P(variety, gamma, cfg, d=d, dim_r2=dim_r2)
    if not nondefective:
        logger.warning("%s j=%d: conditions matrix short of j(d+1) = %d", variety, j, j * (d + 1))
    logger.info("%s j=%d: dim Sigma %d, dim B %d, eps(Y) %d", variety, j, sigma, dim_b, eps_y)
    return FaceDims(
        j=j,
        dim_sigma=sigma,
        dim_P_formula=dim_r2 - j * (d + 1),
        dim_B=dim_b,
        secant_nondefective=nondefective,
        eps_Y=eps_y,
        dim_IY2=dim_iy2,
    )


def gap_vector(variety, cfg):
    """
    Compute the full gap vector report of a variety.

    Args:
        variety (Parametrization): The parametrized variety X
        cfg (RankConfig): Field, seed, margin, trial budget, nesting and workers

    Returns:
        GapReport: eps(X), the dimensions of every face for j = 1..c and the
            gap vector, each entry checked as both eps(X) - eps(Y_j) and
            dim B - dim Sigma(Gamma)

    Raises:
        SpecError: X is not of dimension 1 <= d < m
        GenericityFailure: No stable rank or independent Gamma was found
        InternalInconsistency: The two routes to some g_j disagree
    """
    info = variety_info(variety, cfg.sampler('projective-dim'), cfg.ctx)
    m, d, c = info.m, info.d, info.c
    r2 = dim_R2(variety, cfg)
    eps = epsilon(variety, cfg, d=d, dim_r2=r2)
    logger.info("%s: m=%d d=%d c=%d dim R2=%d eps=%d", variety, m, d, c, r2, eps)

    chain = generic_chain(variety, cfg, d, c) if cfg.nested else None
    task = partial(face_dims, variety, cfg=cfg, d=d, dim_r2=r2, chain=chain)
    js = range(1, c + 1)
    if cfg.workers > 1 and c > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, c)) as pool:
            faces = tuple(pool.map(task, js))
    else:
        faces = tuple(task(j) for j in js)

    gap = []
    for face in faces:
        via_epsilon = eps - face.eps_Y
        via_faces = face.dim_B - face.dim_sigma
        if via_epsilon != via_faces:
            raise InternalInconsistency(
                f"{variety} j={face.j}: eps(X) - eps(Y) = {via_epsilon} but dim B - dim Sigma = {via_faces}"
                f" (secant_nondefective={face.secant_nondefective})"
            )
        gap.append(via_epsilon)

    return GapReport(
        label=variety.label, m=m, d=d, c=c, w=variety.degree,
        dim_R2=r2, epsilon=eps, gap=tuple(gap), faces=faces,
        ctx=cfg.ctx, seed=cfg.seed, trials=cfg.max_trials, margin=cfg.margin, nested=cfg.nested,
        family=variety.family, family_params=variety.family_params,
        anomalies=_anomalies(variety, gap, eps),
    )


def _anomalies(variety, gap, eps):
    found = []
    if any(g < 0 for g in gap):
        found.append(f"negative gap entry in {gap}")
    if any(b < a for a, b in zip(gap, gap[1:])):
        found.append(f"gap vector {gap} is not weakly increasing")
    if gap and gap[-1] != eps:
        found.append(f"last gap entry {gap[-1]} differs from eps = {eps}")
    for note in found:
        logger.warning("%s: %s", variety, note)
    return tuple(found)
