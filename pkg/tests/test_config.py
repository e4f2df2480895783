import pytest

from shadowcalc.config import Settings, find_config, load_settings
from shadowcalc.errors import ParseError


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_defaults_without_file(workdir):
    assert find_config(workdir) is None
    assert load_settings(environ={}) == Settings()


def test_toml_table(workdir):
    path = workdir / "shadowcalc.toml"
    path.write_text('[shadowcalc]\nseed = 7\nbackend = "matrix"\nlog_level = "info"\n', encoding="utf-8")
    settings = load_settings(path, environ={})
    assert settings.seed == 7
    assert settings.backend == "matrix"
    assert settings.log_level == "INFO"


def test_yaml_top_level_found_in_cwd(workdir):
    (workdir / "shadowcalc.yaml").write_text("instances: 4\njobs: 2\n", encoding="utf-8")
    settings = load_settings(environ={})
    assert (settings.instances, settings.jobs) == (4, 2)


def test_overrides_beat_file_and_none_is_ignored(workdir):
    path = workdir / "shadowcalc.toml"
    path.write_text("seed = 3\ninstances = 9\n", encoding="utf-8")
    settings = load_settings(path, {"seed": 11, "instances": None}, environ={})
    assert settings.seed == 11
    assert settings.instances == 9


def test_env_seed_beats_everything(workdir):
    path = workdir / "shadowcalc.toml"
    path.write_text("seed = 3\n", encoding="utf-8")
    settings = load_settings(path, {"seed": 11}, environ={"SHADOWCALC_SEED": "42"})
    assert settings.seed == 42


def test_unknown_keys_are_ignored(workdir):
    path = workdir / "shadowcalc.toml"
    path.write_text("colour = \"blue\"\nseed = 1\n", encoding="utf-8")
    assert load_settings(path, environ={}).seed == 1


@pytest.mark.parametrize("overrides", [
    {"backend": "sparse"},
    {"log_level": "LOUD"},
    {"instances": 0},
    {"jobs": 0},
])
def test_bad_values_raise_parse_error(workdir, overrides):
    with pytest.raises(ParseError):
        load_settings(None, overrides, environ={})


def test_bad_env_seed(workdir):
    with pytest.raises(ParseError):
        load_settings(environ={"SHADOWCALC_SEED": "many"})


def test_unparseable_file(workdir):
    path = workdir / "shadowcalc.toml"
    path.write_text("seed = = 1\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_settings(path, environ={})
