from math import comb
from unittest import mock

from django.test import SimpleTestCase, tag

from gaps.dims import (
    RankConfig, _stable_rank, conditions_matrix, dim_P, dim_R2, dim_sigma, epsilon, epsilon_projection, gap_vector,
    generic_chain, independence_tangent_check, vanishing_series,
)
from gaps.exactalg import PRIMES, DenseMatrix, FieldContext, SeededSampler
from gaps.exceptions import GenericityFailure, SpecError
from gaps.properties import veronese_p2_closed_form
from gaps.reports import report_to_dict
from gaps.variety import PointSample, from_spec, sample_points, segre, veronese

from .helpers import data_path, fp_config, qq_config

TWISTED_CUBIC = f"file:{data_path('twisted_cubic.var')}"
SCROLL = f"toric:file={data_path('scroll_s12.txt')}"


def gamma_of(variety, j, seed=5, ctx=None):
    return sample_points(variety, j, SeededSampler(seed, j), ctx or FieldContext.prime_field())


def comparable(report):
    """Report contents that must not depend on the field or the scheduling."""
    data = report_to_dict(report)
    for key in ('mode', 'prime', 'certainty'):
        data.pop(key)
    return data


class RankConfigTests(SimpleTestCase):
    def test_validation(self):
        ctx = FieldContext.prime_field()
        for kwargs in ({'margin': 0}, {'max_trials': 1}, {'workers': 0}):
            with self.subTest(**kwargs), self.assertRaises(ValueError):
                RankConfig(ctx=ctx, **kwargs)

    def test_samplers_are_keyed_by_task(self):
        cfg = fp_config(seed=3)
        self.assertEqual(cfg.sampler('sigma', 1, 0).elements(cfg.ctx, 5), cfg.sampler('sigma', 1, 0).elements(cfg.ctx, 5))
        self.assertNotEqual(cfg.sampler('sigma', 1, 0).stream_id, cfg.sampler('sigma', 1, 1).stream_id)


class StableRankTests(SimpleTestCase):
    def test_two_agreeing_trials(self):
        cfg = fp_config()
        calls = []

        def table(sampler, ctx):
            calls.append(sampler.stream_id)
            return DenseMatrix.identity(ctx, 4)

        self.assertEqual(_stable_rank(cfg, 'identity', 1, table), 4)
        self.assertEqual(len(calls), 2)
        self.assertNotEqual(calls[0], calls[1])

    def test_trials_run_over_distinct_primes(self):
        cfg = RankConfig(ctx=FieldContext.prime_field(9))
        fields = []

        def table(sampler, ctx):
            fields.append(ctx)
            return DenseMatrix.identity(ctx, 4)

        _stable_rank(cfg, 'identity', 1, table)
        self.assertEqual([ctx.prime for ctx in fields], [PRIMES[9], PRIMES[0]])

    def test_rank_drop_over_one_prime_is_outvoted(self):
        cfg = fp_config()

        def table(sampler, ctx):
            return DenseMatrix.identity(ctx, 3 if ctx == cfg.ctx else 5)

        self.assertEqual(_stable_rank(cfg, 'unlucky', 1, table), 5)

    def test_rational_trials_stay_rational(self):
        cfg = qq_config()
        fields = set()

        def table(sampler, ctx):
            fields.add(ctx)
            return DenseMatrix.identity(ctx, 2)

        _stable_rank(cfg, 'identity', 1, table)
        self.assertEqual(fields, {cfg.ctx})

    def test_no_agreement_raises(self):
        cfg = fp_config(max_trials=3)
        sizes = iter([1, 2, 3])

        def table(sampler, ctx):
            return DenseMatrix.identity(ctx, next(sizes))

        with self.assertRaises(GenericityFailure):
            _stable_rank(cfg, 'growing', 1, table)

    def test_sigma_trials_rederive_the_series(self):
        x = veronese(2, 3)
        gamma = gamma_of(x, 2)
        with mock.patch('gaps.dims.vanishing_series', wraps=vanishing_series) as series:
            self.assertEqual(dim_sigma(x, gamma, fp_config()), 22)
        fields = [call.args[2] for call in series.call_args_list]
        self.assertEqual([ctx.prime for ctx in fields], [PRIMES[0], PRIMES[1]])


class QuadraticDeficiencyTests(SimpleTestCase):
    def test_dim_R2(self):
        cfg = fp_config()
        self.assertEqual(dim_R2(veronese(2, 2), cfg), 15)
        self.assertEqual(dim_R2(veronese(2, 3), cfg), 28)
        self.assertEqual(dim_R2(segre(2, 2), cfg), 36)

    def test_veronese_surfaces(self):
        for d in range(2, 6):
            with self.subTest(d=d):
                self.assertEqual(epsilon(veronese(2, d), fp_config()), comb(d - 1, 2))

    def test_binomial_formula(self):
        for n, d in ((3, 2), (4, 2), (3, 3)):
            with self.subTest(n=n, d=d):
                expected = comb(n + 2 * d, 2 * d) - (n + 1) * comb(n + d, d) + comb(n + 1, 2)
                self.assertEqual(epsilon(veronese(n, d), fp_config()), expected)

    def test_segre(self):
        self.assertEqual(epsilon(segre(1, 2), fp_config()), 0)
        self.assertEqual(epsilon(segre(2, 2), fp_config()), 1)

    @tag('slow')
    def test_veronese_sextic_surface(self):
        self.assertEqual(epsilon(veronese(2, 6), fp_config()), 10)

    @tag('slow')
    def test_quartic_threefold(self):
        self.assertEqual(epsilon(veronese(3, 4), fp_config()), 31)


class VanishingSeriesTests(SimpleTestCase):
    def test_empty_gamma_gives_every_linear_form(self):
        ctx = FieldContext.prime_field()
        series = vanishing_series(veronese(2, 2), [], ctx)
        self.assertEqual(series, DenseMatrix.identity(ctx, 6))

    def test_one_point_on_twisted_cubic(self):
        ctx = FieldContext.rational()
        point = PointSample((1, 1), (1, 1, 1, 1))
        series = vanishing_series(veronese(1, 3), [point], ctx)
        self.assertEqual(series.shape, (3, 4))
        self.assertEqual(series.rank(), 3)
        self.assertTrue(all(sum(row) == 0 for row in series.to_lists()))

    def test_codimension_many_points_leave_d_plus_one_forms(self):
        x = veronese(2, 3)
        self.assertEqual(vanishing_series(x, gamma_of(x, 7), FieldContext.prime_field()).rows, 3)

    def test_too_many_points(self):
        x = veronese(1, 3)
        with self.assertRaises(SpecError):
            vanishing_series(x, gamma_of(x, 4), FieldContext.prime_field())

    def test_repeated_point_is_not_generic(self):
        x = veronese(2, 3)
        [p] = gamma_of(x, 1)
        with self.assertRaises(GenericityFailure):
            vanishing_series(x, [p, p], FieldContext.prime_field())


class SigmaTests(SimpleTestCase):
    def test_projection_to_the_plane(self):
        x = veronese(2, 3)
        self.assertEqual(dim_sigma(x, gamma_of(x, 7), fp_config()), 6)

    def test_empty_gamma_is_dim_R2(self):
        self.assertEqual(dim_sigma(veronese(2, 3), [], fp_config()), 28)

    def test_one_point(self):
        x = veronese(2, 3)
        self.assertEqual(dim_sigma(x, gamma_of(x, 1), fp_config()), 25)


class ConditionsTests(SimpleTestCase):
    def test_one_point_on_twisted_cubic(self):
        x = veronese(1, 3)
        ctx = FieldContext.prime_field()
        conditions = conditions_matrix(x, gamma_of(x, 1), ctx)
        self.assertEqual(conditions.shape, (3, 10))
        self.assertEqual(conditions.rank(), 2)

    def test_generic_points_are_non_defective(self):
        x = veronese(2, 3)
        ctx = FieldContext.prime_field()
        for j in range(1, 8):
            with self.subTest(j=j):
                self.assertEqual(conditions_matrix(x, gamma_of(x, j), ctx).rank(), 3 * j)

    def test_duplicate_point_adds_nothing(self):
        x = veronese(2, 3)
        ctx = FieldContext.prime_field()
        [p] = gamma_of(x, 1)
        self.assertEqual(conditions_matrix(x, [p, p], ctx).rank(), conditions_matrix(x, [p], ctx).rank())

    def test_dim_P(self):
        x = veronese(2, 3)
        self.assertEqual(dim_P(x, gamma_of(x, 1), fp_config()), (25, True))
        y = veronese(2, 2)
        self.assertEqual(dim_P(y, gamma_of(y, 3), fp_config()), (6, True))
        self.assertEqual(dim_P(y, [], fp_config()), (15, True))

    def test_dim_P_rejects_more_points_than_codimension(self):
        y = veronese(2, 2)
        with self.assertRaises(SpecError):
            dim_P(y, gamma_of(y, 4), fp_config(), d=2)


class TangentCheckTests(SimpleTestCase):
    def test_single_point(self):
        x = veronese(2, 3)
        self.assertTrue(independence_tangent_check(x, gamma_of(x, 1), fp_config(), d=2))

    def test_codimension_many_points(self):
        x = veronese(2, 3)
        self.assertTrue(independence_tangent_check(x, gamma_of(x, 7), fp_config(), d=2))

    def test_repeated_point(self):
        x = veronese(2, 3)
        [p] = gamma_of(x, 1)
        self.assertFalse(independence_tangent_check(x, [p, p], fp_config(), d=2))


class ProjectionTests(SimpleTestCase):
    def test_projection_to_projective_space_has_no_deficiency(self):
        self.assertEqual(epsilon_projection(veronese(2, 3), 7, fp_config()), (0, 0))

    def test_penultimate_projection(self):
        eps_y, _ = epsilon_projection(veronese(2, 3), 6, fp_config())
        self.assertEqual(eps_y, 1)
        eps_y, _ = epsilon_projection(veronese(2, 2), 2, fp_config())
        self.assertEqual(eps_y, 0)

    def test_out_of_range(self):
        with self.assertRaises(SpecError):
            epsilon_projection(veronese(2, 2), 4, fp_config())
        with self.assertRaises(SpecError):
            epsilon_projection(veronese(2, 2), 0, fp_config())

    def test_pinned_gamma(self):
        x = veronese(2, 3)
        self.assertEqual(epsilon_projection(x, 1, fp_config(), d=2, gamma=gamma_of(x, 1)), (1, 20))

    def test_gap_vector_projects_once_per_face(self):
        with mock.patch('gaps.dims.epsilon_projection', wraps=epsilon_projection) as projection:
            report = gap_vector(veronese(2, 2), fp_config())
        self.assertEqual([call.args[1] for call in projection.call_args_list], [1, 2, 3])
        self.assertEqual([face.eps_Y for face in report.faces], [0, 0, 0])


class GapVectorTests(SimpleTestCase):
    def assertGap(self, spec, expected, cfg=None):
        report = gap_vector(from_spec(spec), cfg or fp_config())
        self.assertEqual(report.gap, tuple(expected))
        self.assertEqual(report.c, len(expected))
        for face, g in zip(report.faces, report.gap):
            self.assertEqual(face.dim_B - face.dim_sigma, g)
            self.assertEqual(report.epsilon - face.eps_Y, g)
            self.assertTrue(face.secant_nondefective)
            self.assertEqual(face.dim_P_formula, face.dim_B)
        self.assertEqual(report.anomalies, ())
        return report

    def test_veronese_surfaces_match_closed_form(self):
        for d in (2, 3, 4):
            with self.subTest(d=d):
                self.assertGap(f"veronese:n=2,d={d}", veronese_p2_closed_form(d))

    def test_cubic_surface_example(self):
        self.assertGap('veronese:n=2,d=3', (0, 0, 0, 0, 0, 0, 1))

    def test_minimal_degree_varieties(self):
        self.assertGap('segre:a=1,b=1', (0,))
        self.assertGap('segre:a=1,b=2', (0, 0))
        self.assertGap(TWISTED_CUBIC, (0, 0))
        self.assertGap(SCROLL, (0, 0))

    def test_deficiency_one(self):
        self.assertGap('segre:a=2,b=2', (0, 0, 0, 1))
        self.assertGap('delpezzo:k=6', (1,))
        self.assertGap('delpezzo:k=5', (0, 1))
        self.assertGap('delpezzo:k=4', (0, 0, 1))
        self.assertGap('delpezzo:k=3', (0, 0, 0, 1))

    def test_report_shape(self):
        report = self.assertGap('veronese:n=2,d=2', (0, 0, 0))
        self.assertEqual((report.m, report.d, report.c, report.w), (5, 2, 3, 2))
        self.assertEqual(report.dim_R2, 15)
        self.assertEqual(report.dim_I2, 6)
        self.assertEqual([face.j for face in report.faces], [1, 2, 3])

    def test_identical_runs_are_identical(self):
        x = veronese(2, 3)
        self.assertEqual(comparable(gap_vector(x, fp_config(seed=9))), comparable(gap_vector(x, fp_config(seed=9))))

    def test_parallel_faces_do_not_change_the_report(self):
        x = veronese(2, 3)
        self.assertEqual(
            report_to_dict(gap_vector(x, fp_config(seed=4))),
            report_to_dict(gap_vector(x, fp_config(seed=4, workers=3))),
        )

    def test_nested_chain(self):
        report = self.assertGap('veronese:n=2,d=3', (0, 0, 0, 0, 0, 0, 1), fp_config(nested=True))
        self.assertTrue(report.nested)

    def test_nested_faces_use_prefixes_of_one_chain(self):
        real_check = independence_tangent_check
        attempts = []

        def reject_first_chain(*args, **kwargs):
            attempts.append(len(args[1]))
            return len(attempts) > 1 and real_check(*args, **kwargs)

        cfg = fp_config(nested=True)
        with mock.patch('gaps.dims.independence_tangent_check', side_effect=reject_first_chain), \
                mock.patch('gaps.dims.dim_sigma', wraps=dim_sigma) as sigma:
            report = gap_vector(veronese(2, 2), cfg)
        self.assertEqual(attempts, [3, 3])
        self.assertEqual(report.gap, (0, 0, 0))
        chain = sample_points(veronese(2, 2), 3, cfg.sampler('gamma-chain', 3, 1), cfg.ctx)
        gammas = [call.args[1] for call in sigma.call_args_list]
        self.assertEqual(gammas, [chain[:1], chain[:2], chain[:3]])

    def test_chain_is_redrawn_whole(self):
        x = veronese(2, 2)
        cfg = fp_config(nested=True)
        with mock.patch('gaps.dims.independence_tangent_check', side_effect=[False, True]):
            chain = generic_chain(x, cfg, 2, 3)
        self.assertEqual(chain, sample_points(x, 3, cfg.sampler('gamma-chain', 3, 1), cfg.ctx))

    def test_chain_gives_up_after_max_trials(self):
        with mock.patch('gaps.dims.independence_tangent_check', return_value=False):
            with self.assertRaises(GenericityFailure):
                generic_chain(veronese(2, 2), fp_config(nested=True), 2, 3)

    def test_other_primes(self):
        cfg = RankConfig(ctx=FieldContext.prime_field(7), seed=1)
        self.assertGap('veronese:n=2,d=3', (0, 0, 0, 0, 0, 0, 1), cfg)

    def test_exact_mode_agrees_on_small_instances(self):
        for spec in ('veronese:n=2,d=2', 'segre:a=1,b=1'):
            with self.subTest(spec=spec):
                x = from_spec(spec)
                self.assertEqual(comparable(gap_vector(x, qq_config())), comparable(gap_vector(x, fp_config())))

    def test_linear_space_is_rejected(self):
        with self.assertRaises(SpecError):
            gap_vector(from_spec('veronese:n=2,d=1'), fp_config())

    @tag('slow')
    def test_closed_form_over_seeds(self):
        for d in range(2, 7):
            for seed in (0, 1, 2):
                with self.subTest(d=d, seed=seed):
                    self.assertGap(f"veronese:n=2,d={d}", veronese_p2_closed_form(d), fp_config(seed=seed))

    @tag('slow')
    def test_quartic_threefold(self):
        report = self.assertGap('veronese:n=3,d=4', (0,) * 23 + (3, 10, 16, 21, 25, 28, 30, 31))
        self.assertEqual(report.epsilon, 31)

    @tag('slow')
    def test_binomial_formula_instances(self):
        for n, d in ((3, 2), (4, 2), (3, 3)):
            with self.subTest(n=n, d=d):
                report = gap_vector(veronese(n, d), fp_config())
                self.assertEqual(report.gap[-1], report.epsilon)
                for face in report.faces:
                    self.assertTrue(face.secant_nondefective)

    @tag('slow')
    def test_exact_mode_agreement(self):
        for spec in ('veronese:n=2,d=3', 'veronese:n=2,d=4', 'segre:a=2,b=2', 'delpezzo:k=6'):
            with self.subTest(spec=spec):
                x = from_spec(spec)
                self.assertEqual(comparable(gap_vector(x, qq_config())), comparable(gap_vector(x, fp_config())))
