import pytest

from twistlab.config import ExperimentConfig, load_config, parse_config, split_modulus, with_overrides
from twistlab.errors import ConfigError
from twistlab.residue import is_prime

GOOD = """
# a small sweep
kind = sweep-thm1
q0 = 101
q1 = 7
x-values = 100, 1000
seed = 0x10
timing = false
"""


def test_parse_round_trip():
    cfg = parse_config(GOOD).validate()
    assert cfg.kind == "sweep-thm1" and (cfg.q0, cfg.q1) == (101, 7)
    assert cfg.x_grid() == [100.0, 1000.0]
    assert cfg.seed == 16 and cfg.timing is False
    assert cfg.k0 == "kl:3" and cfg.draws == 500


def test_geometric_grid():
    cfg = ExperimentConfig(q0=101, q1=7, x_start=10, x_ratio=3, x_count=4)
    assert cfg.x_grid() == [10, 30, 90, 270]
    assert ExperimentConfig(q0=101, q1=7).x_grid() == []


@pytest.mark.parametrize("text", [
    "kind = sweep-thm1\nbogus = 1",
    "kind = sweep-thm1\nx_values = 1",
    "kind = sweep-thm1\nkind = sweep-ap",
    "just words",
    "z = nan",
    "timing = maybe",
    "q0 = many",
])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("changes", [
    {"kind": "nope"},
    {"q0": 100},
    {"q1": 101},
    {"x_values": (10.0, 5.0)},
    {"x_values": (-1.0,)},
    {"z": 0.5},
    {"threads": 0},
    {"seed": 2**64},
    {"split": "1/2"},
    {"draws": -1},
    {"kind": "sqrtcancel-histogram", "q0_list": ()},
    {"kind": "sqrtcancel-histogram", "q0_list": (101, 100)},
])
def test_validate_errors(changes):
    cfg = with_overrides(ExperimentConfig(q0=101, q1=7), **changes)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_missing_moduli():
    with pytest.raises(ConfigError):
        ExperimentConfig().validate()


@pytest.mark.parametrize("q,rule", [(10**5, "2/3"), (10**6, "4/5"), (3000, "2/3")])
def test_split_modulus(q, rule):
    q0, q1 = split_modulus(q, rule)
    assert is_prime(q0) and is_prime(q1) and q0 != q1
    e = 2 / 3 if rule == "2/3" else 4 / 5
    assert abs(q0 / q**e - 1) < 0.1
    assert abs(q0 * q1 / q - 1) < 0.6
    assert ExperimentConfig(q=q, split=rule).moduli() == (q0, q1)
    with pytest.raises(ConfigError):
        split_modulus(4)


def test_load_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(GOOD, encoding="utf-8")
    assert load_config(path) == parse_config(GOOD)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
    assert with_overrides(parse_config(GOOD), seed=None, threads=4).threads == 4
