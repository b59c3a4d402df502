r"""Unit tests for Killing fields, wedge regions and the de Sitter hyperboloid"""
import numpy as np
import pytest

from errors import NotTangent, OffHyperboloid
from spacetime import (
    AMBIENT_DE_SITTER,
    MINKOWSKI,
    CausalCharacter,
    FlatSpace,
    WedgeLabel,
    boost_flow,
    check_on_hyperboloid,
    de_sitter_wedge,
    dilation,
    ds_tangency_residual,
    field_flow,
    generators,
    horizon_residual,
    induced_metric,
    isometry_algebra_dim,
    killing_residual,
    lorentz,
    printed_regions,
    sample_bifurcation_surface,
    sample_de_sitter,
    sample_points,
    tangency_fractions,
    tangent_generators,
    timelike_character,
    translation,
    wedge_audit,
    wedge_classify,
)


class TestKillingFields:
    """Tests for the affine generators of flat-space isometries"""

    @pytest.mark.parametrize("dim", [2, 3, 4, 5])
    def test_generators_are_killing(self, dim):
        fields = generators(FlatSpace(dim))
        assert len(fields) == dim * (dim + 1) // 2
        assert all(killing_residual(f) == 0 for f in fields)

    @pytest.mark.parametrize("dim", [2, 4, 5])
    def test_dilation_is_not_killing(self, dim):
        assert killing_residual(dilation(FlatSpace(dim))) == 2

    @pytest.mark.parametrize("dim, expected", [(2, 3), (3, 6), (4, 10), (5, 15)])
    def test_isometry_dimension(self, dim, expected):
        assert isometry_algebra_dim(FlatSpace(dim)) == expected

    def test_boost_components(self):
        x = np.array([0.3, 1.2, 5.0, -1.0])
        assert np.array_equal(lorentz(MINKOWSKI, 0, 1)(x), [-1.2, -0.3, 0.0, 0.0])

    def test_rotation_components(self):
        # x1 d2 - x2 d1 at (0, 1, 0, 0) points along +d2
        assert np.array_equal(lorentz(MINKOWSKI, 1, 2)([0, 1, 0, 0]), [0, 0, 1, 0])

    def test_translation(self):
        assert np.array_equal(translation(MINKOWSKI, 2)(np.zeros(4)), [0, 0, 1, 0])

    def test_negation(self):
        boost = lorentz(MINKOWSKI, 0, 1)
        assert (-boost).label == "-L01"
        assert (-(-boost)).label == "L01"
        assert np.array_equal((-boost).A, -boost.A)

    def test_too_small_space(self):
        with pytest.raises(ValueError):
            FlatSpace(1)


class TestFlows:
    @pytest.mark.parametrize("t", [-1.5, 0.3, 2.0])
    def test_boost_flow_is_reversed_field_flow(self, t):
        x = np.array([0.4, -0.9, 1.0, 2.0])
        assert np.allclose(field_flow(lorentz(MINKOWSKI, 0, 1), x, -t), boost_flow(x, t), atol=1e-12)

    @pytest.mark.parametrize("t", [-1.0, 0.7])
    def test_flows_preserve_interval(self, t, rng):
        for field in generators(MINKOWSKI):
            x = rng.normal(size=4)
            y = rng.normal(size=4)
            before = MINKOWSKI.norm2(x - y)
            after = MINKOWSKI.norm2(field_flow(field, x, t) - field_flow(field, y, t))
            assert after == pytest.approx(before, abs=1e-9)

    def test_translation_flow(self):
        assert np.allclose(field_flow(translation(MINKOWSKI, 0), np.zeros(4), 2.5), [2.5, 0, 0, 0])

    def test_boost_preserves_horizons(self):
        for t in (-2.0, 0.5, 3.0):
            assert wedge_classify(MINKOWSKI, boost_flow([1.0, 1.0, 0, 0], t), 1e-9) is WedgeLabel.HA
            assert wedge_classify(MINKOWSKI, boost_flow([1.0, -1.0, 0, 0], t), 1e-9) is WedgeLabel.HB

    def test_boost_keeps_wedge_labels(self, rng):
        points = sample_points(MINKOWSKI, 1000, rng)
        labels = [wedge_classify(MINKOWSKI, x) for x in points]
        for t in (-1.5, 0.4, 2.0):
            assert [wedge_classify(MINKOWSKI, boost_flow(x, t)) for x in points] == labels

    def test_boost_fixes_bifurcation_surface(self, rng):
        points = sample_bifurcation_surface(MINKOWSKI, 20, rng)
        assert horizon_residual(lorentz(MINKOWSKI, 0, 1), points) == 0.0
        assert horizon_residual(translation(MINKOWSKI, 2), points) == 1.0


class TestWedges:
    """Tests for the seven-region split"""

    @pytest.mark.parametrize("point, label", [
        ([0.0, 0.0, 1.0, 1.0], WedgeLabel.S),
        ([2.0, 1.0, 0.0, 0.0], WedgeLabel.W1),
        ([1.0, 2.0, 0.0, 0.0], WedgeLabel.W3),
        ([1.0, 1.0, 0.0, 0.0], WedgeLabel.HA),
        ([1.0, -1.0, 0.0, 0.0], WedgeLabel.HB),
        ([-2.0, 1.0, 0.0, 0.0], WedgeLabel.W2),
        ([1.0, -2.0, 0.0, 0.0], WedgeLabel.W4),
    ])
    def test_classify(self, point, label):
        assert wedge_classify(MINKOWSKI, point) is label

    def test_horizon_band(self):
        assert wedge_classify(MINKOWSKI, [1.0, 1.0 + 1e-13, 0, 0]) is WedgeLabel.HA
        assert wedge_classify(MINKOWSKI, [1.0, 1.0 + 1e-6, 0, 0]) is WedgeLabel.W3

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            wedge_classify(MINKOWSKI, [1.0, 2.0])

    def test_literal_past_cone_is_empty(self, rng):
        for x in sample_points(MINKOWSKI, 200, rng):
            assert WedgeLabel.W2 not in printed_regions(x)

    def test_literal_side_wedge_reaches_past_cone(self):
        assert printed_regions([-3.0, 1.0, 0.0, 0.0]) == [WedgeLabel.W3]

    @pytest.mark.parametrize("point, character", [
        ([1.0, 2.0, 0, 0], CausalCharacter.TIMELIKE),
        ([2.0, 1.0, 0, 0], CausalCharacter.SPACELIKE),
        ([1.0, 1.0, 0, 0], CausalCharacter.NULL),
    ])
    def test_boost_character(self, point, character):
        assert timelike_character(lorentz(MINKOWSKI, 0, 1), point) is character

    def test_audit(self, rng):
        audit = wedge_audit(MINKOWSKI, sample_points(MINKOWSKI, 400, rng))
        assert audit["side_agreement"] == 1.0
        assert audit["cone_agreement"] == 1.0
        assert audit["printed_cone_agreement"] == 1.0
        assert audit["printed_side_agreement"] < 1.0
        assert audit["side_count"] + audit["cone_count"] == 400


class TestDeSitter:
    """Tests for the hyperboloid eta(x, x) = 1 in 5-dimensional Minkowski space"""

    def test_samples_lie_on_hyperboloid(self, rng):
        for p in sample_de_sitter(50, rng):
            check_on_hyperboloid(p)

    @pytest.mark.parametrize("t", [-1.0, 0.25, 1.5])
    def test_boost_stays_on_hyperboloid(self, t, rng):
        for p in sample_de_sitter(20, rng):
            check_on_hyperboloid(boost_flow(p, t))

    def test_lorentz_fields_are_tangent(self, rng):
        samples = sample_de_sitter(50, rng)
        expected = [f.label for f in generators(AMBIENT_DE_SITTER) if f.label.startswith("L")]
        assert tangent_generators(samples) == expected
        assert len(expected) == 10

    def test_translations_are_not_tangent(self, rng):
        fractions = tangency_fractions(sample_de_sitter(50, rng))
        assert all(fractions[f"T{i}"] == 0.0 for i in range(5))

    def test_tangency_residual(self):
        p = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
        assert ds_tangency_residual(translation(AMBIENT_DE_SITTER, 1), p) == 1.0
        assert ds_tangency_residual(lorentz(AMBIENT_DE_SITTER, 0, 1), p) == 0.0

    def test_tangency_needs_ambient_field(self):
        with pytest.raises(ValueError):
            ds_tangency_residual(translation(MINKOWSKI, 0), [0.0, 1.0, 0.0, 0.0, 0.0])

    @pytest.mark.parametrize("point", [np.zeros(5), [0.0, 2.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    def test_off_hyperboloid(self, point):
        with pytest.raises(OffHyperboloid):
            check_on_hyperboloid(point)

    def test_induced_metric(self):
        p = [0.0, 1.0, 0.0, 0.0, 0.0]
        assert induced_metric(p, [1, 0, 0, 0, 0], [1, 0, 0, 0, 0]) == -1.0
        assert induced_metric(p, [0, 0, 1, 0, 0], [0, 0, 1, 0, 0]) == 1.0
        with pytest.raises(NotTangent):
            induced_metric(p, [0, 1, 0, 0, 0], [1, 0, 0, 0, 0])

    def test_wedge_restriction(self):
        tau = 0.5
        assert de_sitter_wedge([np.sinh(tau), np.cosh(tau), 0, 0, 0]) is WedgeLabel.W3
        assert de_sitter_wedge([np.sinh(tau), -np.cosh(tau), 0, 0, 0]) is WedgeLabel.W4
        assert de_sitter_wedge([0.0, 0.0, 1.0, 0.0, 0.0]) is WedgeLabel.S
