import json

import numpy as np
import pytest

from bimodcat.instances import (InstanceFormatError, InstanceSpec, Limits,
                                generate, load, load_lenient, random_algebra,
                                random_bimodule, save, to_document)


def test_limits_validation():
    Limits()
    with pytest.raises(ValueError):
        Limits(max_blocks=0)
    with pytest.raises(ValueError):
        Limits(max_dim=0)
    with pytest.raises(ValueError):
        Limits(min_mult=2, max_mult=1)
    with pytest.raises(ValueError):
        Limits(min_mult=-1)


def test_generate_deterministic():
    s1 = generate(42)
    s2 = generate(42)
    assert save(s1) == save(s2)
    s3 = generate(43)
    assert save(s1) != save(s3)


def test_generated_chain_is_composable_and_valid():
    for seed in range(10):
        spec = generate(seed)
        assert len(spec.algebras) == len(spec.bimodules) + 1
        for i, x in enumerate(spec.bimodules):
            assert x.left_algebra.blocks == spec.algebras[i].blocks
            assert x.right_algebra.blocks == spec.algebras[i + 1].blocks
            assert x.validate() < 1e-9
        for m in spec.morphisms:
            assert m.is_morphism()


def test_limits_respected():
    lim = Limits(max_blocks=2, max_block=2, max_mult=3, max_dim=12, min_mult=1)
    rng = np.random.default_rng(0)
    for _ in range(30):
        a = random_algebra(rng, lim)
        assert 1 <= len(a.blocks) <= lim.max_blocks
        assert all(1 <= n <= lim.max_block for n in a.blocks)
        b = random_algebra(rng, lim)
        x = random_bimodule(a, b, rng, lim)
        assert x.dim <= lim.max_dim
    # min_mult forces every sector on (when the cap allows it)
    lim2 = Limits(min_mult=1, max_mult=1, max_dim=100)
    rng2 = np.random.default_rng(1)
    a = random_algebra(rng2, lim2)
    b = random_algebra(rng2, lim2)
    x = random_bimodule(a, b, rng2, lim2)
    assert x.dim > 0


def test_save_load_round_trip_byte_identical():
    for seed in (0, 5, 11):
        spec = generate(seed)
        blob = save(spec)
        spec2 = load(blob)
        assert save(spec2) == blob
        assert spec2.seed == spec.seed
        assert len(spec2.bimodules) == len(spec.bimodules)


def test_load_missing_field_names_path():
    doc = to_document(generate(1))
    del doc["bimodules"][0]["left"]
    with pytest.raises(InstanceFormatError, match=r"\$\.bimodules\[0\]\.left"):
        load(json.dumps(doc))


def test_load_version_mismatch():
    doc = to_document(generate(1))
    doc["version"] = 99
    with pytest.raises(InstanceFormatError, match="version"):
        load(json.dumps(doc))


def test_load_rejects_bad_json_and_bad_refs():
    with pytest.raises(InstanceFormatError, match="JSON"):
        load(b"{not json")
    doc = to_document(generate(1))
    doc["bimodules"][0]["left"] = 50
    with pytest.raises(InstanceFormatError, match="out of range"):
        load(json.dumps(doc))


def test_load_lenient_truncates_broken_chain():
    doc = to_document(generate(2))
    # corrupt the second bimodule's basis unitary: no longer unitary
    doc["bimodules"][1]["basis_unitary"][0][0] = [100.0, 0.0]
    spec, violations = load_lenient(json.dumps(doc))
    assert violations
    assert "$.bimodules[1]" in violations[0][0]
    assert len(spec.bimodules) == 1   # chain cut at the broken link
    with pytest.raises(InstanceFormatError):
        load(json.dumps(doc))


def test_load_lenient_skips_bad_morphism():
    doc = to_document(generate(3))
    assert doc["morphisms"]
    m0 = doc["morphisms"][0]
    m0["matrix"] = [[[1.0, 0.0] for _ in row] for row in m0["matrix"]]
    spec, violations = load_lenient(json.dumps(doc))
    n_good = len(to_document(generate(3))["morphisms"]) - 1
    if violations:
        assert len(spec.morphisms) == n_good
        assert "intertwiner" in violations[0][0]
    else:
        # the all-ones matrix happened to intertwine; nothing dropped
        assert len(spec.morphisms) == n_good + 1


def test_chain_consistency_enforced():
    spec = generate(4)
    with pytest.raises(ValueError):
        InstanceSpec(seed=0, limits=Limits(),
                     algebras=spec.algebras[:2], bimodules=spec.bimodules)


def test_signed_zero_round_trip():
    spec = generate(6)
    blob = save(spec)
    assert save(load(blob)) == blob
    doc = json.loads(blob)
    # decode keeps -0.0 imaginary parts distinct in re-serialization
    assert json.dumps(to_document(load(blob)), sort_keys=True) == \
        json.dumps(doc, sort_keys=True)
