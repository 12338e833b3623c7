import math

import pytest

from stratopt.config import (ConfigError, ExperimentSpec, InitDistribution,
                             format_config, load_config)
from stratopt.model import ChartPoint
from stratopt.optim import Method, Mode
from stratopt.presets import PRESET_NAMES, preset

MINIMAL = """\
[experiment]
model = cone
method = gd
target = 1.0 0.0
init = 0.5 2.0
"""


def write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_minimal_config_gets_defaults(tmp_path):
    spec = load_config(write(tmp_path, MINIMAL))
    assert spec.model == "cone"
    assert spec.step_size == 0.01
    assert spec.max_steps == 100_000
    assert spec.damping == 1e-8
    assert spec.mode == "population"
    assert spec.target == ChartPoint(1.0, 0.0)
    assert spec.init == (ChartPoint(0.5, 2.0),)
    assert spec.target_surface == "cone"


def test_unknown_key_is_a_hard_error(tmp_path):
    path = write(tmp_path, MINIMAL + "learning_rate = 0.1\n")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert "unknown key" in str(err.value)
    assert ":6:" in str(err.value)


def test_malformed_number_names_the_line(tmp_path):
    path = write(tmp_path, "[experiment]\nmodel = cone\nstep_size = fast\n"
                           "target = 1 0\ninit = 1 0\n")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert ":3:" in str(err.value)
    assert "malformed number" in str(err.value)


def test_hyperboloid_requires_eps(tmp_path):
    path = write(tmp_path, "[experiment]\nmodel = hyperboloid\nmethod = gd\n"
                           "target = 1 0\ninit = 1 0\n")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert "eps" in str(err.value)


def test_duplicate_key_rejected(tmp_path):
    path = write(tmp_path, MINIMAL + "model = both\n")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert "duplicate key" in str(err.value)


def test_missing_section_rejected(tmp_path):
    path = write(tmp_path, "model = cone\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_comments_and_blank_lines_ignored(tmp_path):
    text = "# leading comment\n\n[experiment]\nmodel = cone  # trailing\n" \
           "method = gd\ntarget = 1 0\ninit = 1 0\n"
    spec = load_config(write(tmp_path, text))
    assert spec.model == "cone"


def test_fixed_init_and_distribution_conflict(tmp_path):
    text = MINIMAL + "init_xi = 0 1\ninit_theta = 0 1\ninit_count = 3\ninit_seed = 1\n"
    with pytest.raises(ConfigError) as err:
        load_config(write(tmp_path, text))
    assert "not both" in str(err.value)


def test_distribution_needs_all_fields(tmp_path):
    text = "[experiment]\nmodel = cone\ntarget = 1 0\ninit_xi = 0 1\ninit_count = 3\n"
    with pytest.raises(ConfigError) as err:
        load_config(write(tmp_path, text))
    assert "init" in str(err.value)


def test_multiple_fixed_inits(tmp_path):
    text = "[experiment]\nmodel = cone\ntarget = 1 0\ninit = 1 0; 2 1; 0.5 -0.25\n"
    spec = load_config(write(tmp_path, text))
    assert len(spec.init) == 3
    assert spec.init[2] == ChartPoint(0.5, -0.25)


def test_distribution_round_trip(tmp_path):
    spec = ExperimentSpec(
        name="sweep", model="both", eps=0.05,
        init=InitDistribution((0.25, 2.0), (-math.pi, math.pi), 20, 7),
        target=ChartPoint(1.0, 0.0),
    )
    path = write(tmp_path, format_config(spec))
    assert load_config(path) == spec


def test_format_parses_back_for_all_presets(tmp_path):
    for name in PRESET_NAMES:
        spec = preset(name)
        path = write(tmp_path, format_config(spec, header_comment="echo"), name + ".cfg")
        assert load_config(path) == spec


def test_optimizer_config_mapping(tmp_path):
    text = ("[experiment]\nmodel = cone\nmethod = ngd\ntarget = 1 0\ninit = 1 0\n"
            "damping = 0.5\nmode = stochastic\nbatch = 4\n")
    spec = load_config(write(tmp_path, text))
    cfg = spec.optimizer_config()
    assert cfg.method is Method.NGD
    assert cfg.mode is Mode.STOCHASTIC
    assert cfg.damping == 0.5
    assert cfg.batch == 4


def test_spec_invariants():
    with pytest.raises(ValueError):
        ExperimentSpec(model="flat", target=ChartPoint(0, 0), init=(ChartPoint(1, 0),))
    with pytest.raises(ValueError):
        ExperimentSpec(model="cone", target=ChartPoint(0, 0))  # init required
    with pytest.raises(ValueError):
        ExperimentSpec(model="cone", init=(ChartPoint(1, 0),))  # target required
    with pytest.raises(ValueError):
        InitDistribution((1.0, 0.0), (0.0, 1.0), 5, 0)
    with pytest.raises(ValueError):
        InitDistribution((0.0, 1.0), (0.0, 1.0), 0, 0)


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset("fig9")


def test_preset_shapes():
    assert preset("fig5a").model == "both"
    assert len(preset("fig5a").init) == 3
    assert preset("fig5b-ngd").method == "ngd"
    assert preset("fig5b-ngd").init.count == 20
    assert preset("fig6-cone").model == "cone"
    assert preset("fig6-hyp").target_surface == "model"
    assert preset("fig1-cusp").model == "cusp"
