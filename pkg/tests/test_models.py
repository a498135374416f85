import json
from pathlib import Path

import pytest

from ainfty.algebra import AInftyAlgebra, BadModel, check_axioms
from ainfty.models import (MODEL_FILES, ModelDescriptor, default_s_max, disaster_fixture, load_model,
                           mutation_fixtures, shipped_models, top_degree_violations, validate_descriptor,
                           write_models)

REPO_MODELS = Path(__file__).resolve().parents[1] / "models"


def test_default_s_max():
    assert default_s_max(2) == 6 and default_s_max(3) == 4 and default_s_max(7) == 4


@pytest.mark.parametrize("desc", shipped_models(), ids=lambda d: d.name)
def test_shipped_models_validate(desc):
    validate_descriptor(desc)
    assert not top_degree_violations(desc.algebra)
    again = ModelDescriptor.from_json(json.loads(desc.dumps()))
    assert again.dumps() == desc.dumps()


def test_mutations_fail_at_declared_property():
    fixtures = mutation_fixtures()
    assert len(fixtures) >= 6
    assert len({label for label, _, _ in fixtures}) == len(fixtures)
    for label, alg, prop in fixtures:
        rep = check_axioms(alg)
        assert rep.first is not None and rep.first.prop == prop, label


def test_mutations_cover_many_properties():
    assert {p for _, _, p in mutation_fixtures()} >= {1, 2, 3, 6, 8, 9, 10}


def test_disaster_fixture_is_flagged():
    bad = disaster_fixture().algebra
    assert bad.tower.monoid.positivity_violations()


def test_write_models_is_deterministic(tmp_path):
    a = write_models(tmp_path / "a")
    b = write_models(tmp_path / "b")
    assert a == b
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
    assert set(a["models"]) == set(MODEL_FILES)


def test_repository_models_are_current(tmp_path):
    write_models(tmp_path)
    for f in sorted(tmp_path.iterdir()):
        assert (REPO_MODELS / f.name).read_bytes() == f.read_bytes(), f.name


def test_load_model_checks(tmp_path):
    for fname in MODEL_FILES:
        desc = load_model(REPO_MODELS / fname)
        assert desc.algebra.dumps() == AInftyAlgebra.from_json(json.loads((REPO_MODELS / fname).read_text())).dumps()
    label, alg, _ = mutation_fixtures()[0]
    path = tmp_path / "m.json"
    path.write_text(ModelDescriptor(alg.name, alg, {}).dumps())
    with pytest.raises(BadModel):
        load_model(path)
    assert load_model(path, check=False).name == alg.name
