import pytest

from shapeletkit import InputFormatError
from shapeletkit.config import RunConfig


def test_defaults_and_seed_override(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("seed: 7\ndiscovery: {min_len: 4}\nforest: {n_trees: 10}\n")
    cfg = RunConfig.load(p)
    assert cfg.discovery.min_len == 4 and cfg.forest.n_trees == 10
    assert cfg.discovery.seed == 7 and cfg.forest.seed == 7
    assert cfg.with_seed(3).forest.seed == 3


def test_hash_is_stable_and_sensitive():
    a = RunConfig.from_dict({"seed": 1})
    assert a.hash() == RunConfig.from_dict({"seed": 1}).hash()
    assert a.hash() != RunConfig.from_dict({"seed": 2}).hash()


@pytest.mark.parametrize("doc", [
    {"sed": 1},
    {"version": 2},
    {"discovery": {"min_length": 3}},
    {"preprocess": {"steps": [{"op": "fft"}]}},
    {"preprocess": {"steps": [{"op": "decimate", "factor": 2, "phase": 1}]}},
])
def test_rejects_unknown_content(doc):
    with pytest.raises(InputFormatError):
        RunConfig.from_dict(doc)


def test_invalid_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("seed: [1\n")
    with pytest.raises(InputFormatError):
        RunConfig.load(p)


def test_round_trip():
    cfg = RunConfig.from_dict({"seed": 5, "preprocess": {"steps": [{"op": "demean"}]},
                               "discovery": {"max_len": 9}})
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
