import numpy as np
import pytest

from graphgeom.errors import ConfigurationError
from graphgeom.experiment import ExperimentConfig, _train_mask, default_regimes, format_table, run_experiment
from graphgeom.metrics import label_informativeness
from graphgeom.synth import generate

SMALL = ExperimentConfig(seeds=(0, 1, 2))


def test_default_regimes_profile():
    inf, dom = default_regimes()
    lg = generate(inf.spec(0))
    assert abs(label_informativeness(lg) - 1.0) <= 1e-12
    assert dom.snr > inf.snr


def test_deterministic():
    a = run_experiment(cfg=SMALL)
    b = run_experiment(cfg=SMALL)
    assert [s.to_dict() for s in a] == [s.to_dict() for s in b]


def test_parallel_matches_serial():
    a = run_experiment(cfg=SMALL)
    b = run_experiment(cfg=SMALL, parallel_trials=3)
    assert [s.to_dict() for s in a] == [s.to_dict() for s in b]


def test_trials_in_seed_order():
    inf, dom = run_experiment(cfg=SMALL, parallel_trials=2)
    assert [t.seed for t in inf.trials] == [0, 1, 2] == [t.seed for t in dom.trials]


def test_stratified_split():
    y = np.repeat([0, 1, 2], [10, 7, 1])
    mask = _train_mask(y, 0.5, seed=3)
    assert [int(mask[y == c].sum()) for c in range(3)] == [5, 4, 0]
    np.testing.assert_array_equal(mask, _train_mask(y, 0.5, seed=3))


def test_format_table():
    text = format_table(run_experiment(cfg=ExperimentConfig(seeds=(0,))))
    assert "informative-heterophilous" in text and "feature-dominated" in text


@pytest.mark.parametrize("kwargs", [{"seeds": ()}, {"hops": -1}, {"train_fraction": 1.0}])
def test_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        ExperimentConfig(**kwargs)
