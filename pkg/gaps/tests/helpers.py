from pathlib import Path

from gaps.dims import FaceDims, GapReport, RankConfig
from gaps.exactalg import FieldContext

DATA_DIR = Path(__file__).resolve().parent / 'data'


def data_path(name):
    return str(DATA_DIR / name)


def fp_config(seed=0, **kwargs):
    return RankConfig(ctx=FieldContext.prime_field(), seed=seed, **kwargs)


def qq_config(seed=0, **kwargs):
    return RankConfig(ctx=FieldContext.rational(), seed=seed, **kwargs)


def fake_report(gap, epsilon, dim_iy2=None, family='custom', family_params=()):
    """Hand-built report with faces shaped around the given gap vector."""
    c = len(gap)
    dim_iy2 = dim_iy2 or [0] * c
    faces = tuple(
        FaceDims(j=j, dim_sigma=10 - j, dim_P_formula=10 - j + g, dim_B=10 - j + g,
                 secant_nondefective=True, eps_Y=epsilon - g, dim_IY2=dim_iy2[j - 1])
        for j, g in enumerate(gap, start=1)
    )
    return GapReport(
        label='fixture', m=c + 2, d=2, c=c, w=2, dim_R2=20, epsilon=epsilon, gap=tuple(gap), faces=faces,
        ctx=FieldContext.prime_field(), seed=0, trials=3, margin=25,
        family=family, family_params=tuple(family_params),
    )
