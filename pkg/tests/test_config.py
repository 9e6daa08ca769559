import numpy as np
import pytest

from bradykde.config import Config, ConfigError, load_config, parse_config
from bradykde.evaluation import SplitSpec
from bradykde.kernels import KernelKind


def test_defaults():
    c = Config()
    assert c.kernel is KernelKind.GAUSSIAN and c.p_fa == 0.05 and c.grid_size == 128
    assert c.trials == 20 and (c.pre, c.post) == (5000, 2500)
    assert c.h_grid() is None
    assert c.pan_tompkins().searchback_factor == 1.66


def test_parse_all_kinds_of_values(tmp_path):
    text = """
    # comment
    kernel = cosine
    p_fa = 0.1
    h_min = 0.05
    h_max = 2
    h_steps = 5
    h_scale = linear
    per_axis = yes
    splits = 0.7,0.1,0.2
    seed = 42
    """
    (tmp_path / "c.cfg").write_text(text)
    c = load_config(tmp_path / "c.cfg")
    assert c.kernel is KernelKind.COSINE and c.p_fa == 0.1 and c.per_axis and c.seed == 42
    assert c.splits == SplitSpec(0.7, 0.1, 0.2)
    np.testing.assert_allclose(c.h_grid(), np.linspace(0.05, 2, 5))


@pytest.mark.parametrize(
    "text, msg",
    [
        ("bogus = 1", "unknown key"),
        ("seed = 1\nseed = 2", ":2: duplicate"),
        ("trials = many", "bad value"),
        ("p_fa = 1.5", "p_fa"),
        ("h_min = 0.1", "both"),
        ("grid_size = 1", "grid_size"),
        ("kernel = box", "bad value"),
        ("no equals sign", "expected"),
        ("per_axis = maybe", "bad value"),
        ("normalization = robust", "normalization"),
    ],
)
def test_rejections(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(text)


def test_replace_ignores_none():
    c = Config().replace(kernel="uniform", seed=None)
    assert c.kernel is KernelKind.UNIFORM and c.seed == 0
    with pytest.raises(ValueError):
        Config().replace(trials=0)
