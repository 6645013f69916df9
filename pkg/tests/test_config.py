import textwrap

import numpy as np
import pytest

from wgnls.config import SimConfig, from_dict, load
from wgnls.errors import ConfigError

BASE = {
    "curve": {"name": "circle"},
    "eps_list": [0.2, 0.1],
    "lambda": 1.0,
    "grid": {"n1": 32, "n2": 8},
    "output_dir": "out",
}


def _cfg(**kw):
    d = dict(BASE)
    d.update(kw)
    return from_dict(d)


def test_defaults():
    c = _cfg()
    assert c.dt_rule == "resolve" and c.dt is None and c.t_end == 1.0
    assert len(c.times()) == 21 and c.times()[-1] == 1.0
    assert c.length1 == pytest.approx(2 * np.pi)


@pytest.mark.parametrize("kw", [
    {"alpha": 2},
    {"eps_list": [0.1, 0.2]},
    {"eps_list": [0.1, 0.1]},
    {"eps_list": [1.5]},
    {"colour": "blue"},
    {"dt": 0.1, "dt_rule": "resolve"},
    {"dt_rule": "fast"},
    {"data_family": "smooth"},
    {"grid": {"n1": 32}},
    {"curve": {"name": "spiral"}},
    {"snapshot_times": [0.5, 0.2]},
    {"curve": {"name": "bump"}},
])
def test_rejections(kw):
    with pytest.raises(ConfigError):
        _cfg(**kw)


def test_missing_key():
    d = dict(BASE)
    del d["lambda"]
    with pytest.raises(ConfigError):
        from_dict(d)


def test_open_curve_config():
    c = _cfg(curve={"name": "bump", "params": {"a": 0.5}}, L_box=20.0)
    assert c.domain_kind == "open" and c.length1 == 20.0


def test_load_toml(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text(textwrap.dedent("""
        curve = { name = "perturbed_circle", params = { a = 0.3, n = 2 } }
        eps_list = [0.2, 0.1, 0.05]
        lambda = -1.0
        grid = { n1 = 64, n2 = 8 }
        dt = 1e-3
        snapshot_times = [0.0, 0.5, 1.0]
        output_dir = "res"
    """))
    c = load(str(p))
    assert isinstance(c, SimConfig)
    assert c.curve_params == {"a": 0.3, "n": 2} and c.dt == 1e-3 and c.dt_rule is None
    assert c.times() == [0.0, 0.5, 1.0]
    assert c.output_dir == str(tmp_path / "res")
    with pytest.raises(ConfigError):
        load(str(tmp_path / "missing.toml"))
    bad = tmp_path / "bad.toml"
    bad.write_text("curve = [")
    with pytest.raises(ConfigError):
        load(str(bad))
