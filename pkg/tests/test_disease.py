import collections

import numpy as np
import pytest

import normsim.base
from normsim import disease
from normsim.disease import HealthState

N = 100000


class TestDiseaseParams(object):
    @pytest.mark.parametrize('state, vaccinated, at_home, want', [
        (HealthState.ASYMPTOMATIC, False, False, (0.1, 0.1)),
        (HealthState.MILD, False, True, (0.005, 0.1)),
        (HealthState.MILD, True, False, (0.005, 0.05)),
        (HealthState.CRITICAL, True, True, (0.0025, 0.02)),
    ])
    def test_transition(self, state, vaccinated, at_home, want):
        progress, recover, stay = disease.DiseaseParams().transition(
            state, vaccinated, at_home)
        assert (progress, recover) == pytest.approx(want)
        assert progress + recover + stay == pytest.approx(1.0)

    @pytest.mark.parametrize('kwargs', [
        {'infection_prob': 1.5},
        {'vaccine_multiplier': 0.0},
        {'home_divisor': 0.5},
        {'recover_base': {HealthState.MILD: 0.99}},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(normsim.base.ConfigError):
            disease.DiseaseParams(**kwargs)


class TestProgress(object):
    @pytest.mark.parametrize('u, want', [
        (0.05, HealthState.MILD),
        (0.15, HealthState.HEALTHY),
        (0.5, HealthState.ASYMPTOMATIC),
    ])
    def test_single_draw(self, draws, u, want):
        rng = draws([u])
        assert disease.progress(rng, HealthState.ASYMPTOMATIC, False, False,
                                disease.DiseaseParams()) is want
        assert not rng.uniforms

    def test_healthy_stays_healthy(self, draws):
        rng = draws()
        assert disease.progress(rng, HealthState.HEALTHY, False, False,
                                disease.DiseaseParams()) is HealthState.HEALTHY

    def test_critical_can_die(self, draws):
        assert disease.progress(draws([0.001]), HealthState.CRITICAL, False,
                                False, disease.DiseaseParams()) \
            is HealthState.DECEASED

    def test_deceased(self, rng):
        with pytest.raises(normsim.base.DeceasedInput):
            disease.progress(rng, HealthState.DECEASED, False, False,
                             disease.DiseaseParams())

    def test_mild_to_critical_rate_at_home(self, rng):
        params = disease.DiseaseParams()
        hits = sum(
            disease.progress(rng, HealthState.MILD, False, True, params)
            is HealthState.CRITICAL for _ in range(N))
        assert abs(hits / float(N) - 0.005) < 0.001


class TestInfection(object):
    @pytest.mark.parametrize('vaccinated, want', [
        (False, 0.80),
        (True, 0.40),
    ])
    def test_rate(self, rng, vaccinated, want):
        params = disease.DiseaseParams()
        hits = sum(disease.try_infect(rng, vaccinated, params)
                   for _ in range(N))
        assert abs(hits / float(N) - want) < 0.01


class TestObservation(object):
    @pytest.mark.parametrize('actual', [
        HealthState.HEALTHY,
        HealthState.ASYMPTOMATIC,
        HealthState.MILD,
        HealthState.CRITICAL,
    ])
    def test_rows(self, rng, actual):
        seen = collections.Counter(
            disease.observe_health(rng, actual) for _ in range(N))
        want = disease.ObservationModel.DEFAULT_ROWS[actual]
        for perceived, p in zip(disease.PERCEIVED, want):
            assert abs(seen[perceived] / float(N) - p) < 0.01

    def test_never_asymptomatic(self, rng):
        for _ in range(1000):
            assert disease.observe_health(rng, HealthState.MILD) \
                in disease.PERCEIVED

    def test_deceased(self, rng):
        with pytest.raises(normsim.base.DeceasedInput):
            disease.observe_health(rng, HealthState.DECEASED)

    def test_custom_row(self, draws):
        model = disease.ObservationModel(
            {HealthState.HEALTHY: (0.0, 0.0, 1.0)})
        assert model.sample(draws([0.0]), HealthState.HEALTHY) \
            is HealthState.CRITICAL
        np.testing.assert_allclose(model.rows[HealthState.MILD],
                                   (0.3, 0.6, 0.1))

    def test_bad_row(self):
        with pytest.raises(normsim.base.ConfigError):
            disease.ObservationModel({HealthState.MILD: (0.5, 0.6, 0.1)})


class TestHealthState(object):
    def test_self_assessed(self):
        assert HealthState.ASYMPTOMATIC.self_assessed is HealthState.MILD
        assert HealthState.MILD.self_assessed is HealthState.MILD
        assert HealthState.HEALTHY.self_assessed is HealthState.HEALTHY
        assert HealthState.ASYMPTOMATIC.infectious
        assert not HealthState.HEALTHY.infectious
        assert not HealthState.DECEASED.infectious
