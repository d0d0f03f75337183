import json
import math

import numpy as np
import pytest

from flagcurve import (
    CohomologyClass,
    FuchsianSeed,
    Presentation,
    Word,
    ball_count,
    enumerate_ball,
    eval_u,
    standard_fuchsian,
    translation_length,
)
from flagcurve.ball import BallTable
from flagcurve.errors import NotHyperbolic, UnsupportedGenus
from flagcurve.surface import attractive_direction, matrix_fingerprint, standard_relator


def test_standard_seed_relator(seed2):
    assert seed2.relator_residual() <= 1e-8
    m = np.eye(2)
    for j in range(2):
        a, b = seed2.generators[2 * j], seed2.generators[2 * j + 1]
        m = m @ a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
    assert np.linalg.norm(m - np.eye(2)) <= 1e-8  # plus identity, not minus


def test_standard_seed_genus3():
    s3 = standard_fuchsian(3)
    assert len(s3.generators) == 6
    assert s3.relator_residual() <= 1e-8


def test_generators_hyperbolic(seed2):
    for m in seed2.generators:
        assert abs(np.trace(m)) > 2.0


def test_short_words_hyperbolic(seed2):
    assert seed2.short_word_min_trace() > 2.0


def test_rejects_low_genus():
    with pytest.raises(UnsupportedGenus):
        standard_fuchsian(1)
    with pytest.raises(UnsupportedGenus):
        Presentation(0)


def test_presentation_relator():
    p = Presentation(2)
    assert p.generator_names == ("a1", "b1", "a2", "b2")
    assert str(p.relator) == "a1.b1.A1.B1.a2.b2.A2.B2"


def test_ball_counts(seed2):
    for radius in range(5):
        words = list(enumerate_ball(seed2, radius))
        assert len(words) == ball_count(2, radius)
    assert ball_count(2, 1) == 9


def test_ball_no_duplicates_and_shortlex(seed2):
    words = [str(w) for w, _ in enumerate_ball(seed2, 3)]
    assert len(set(words)) == len(words)
    keys = [(len(w.letters), w.letters) for w, _ in enumerate_ball(seed2, 3)]
    assert keys == sorted(keys)


def test_ball_matrices_are_products(seed2):
    letters = seed2.letter_matrices()
    for w, m in enumerate_ball(seed2, 3):
        ref = np.eye(2)
        for l in w.letters:
            ref = ref @ letters[l]
        assert np.allclose(m, ref, atol=1e-12)


def test_word_parse_round_trip():
    w = Word.parse("a1.B2.a1", 2)
    assert str(w) == "a1.B2.a1"
    assert str(w.inverse()) == "A1.b2.A1"
    assert str(w.concat(w.inverse())) == ""
    with pytest.raises(ValueError):
        Word((0, 1), 2)  # a1 followed by its inverse


def test_cyclic_reduction():
    assert Word.parse("a1.b1.A1", 2).is_cyclically_reduced() is False
    assert Word.parse("a1.b1", 2).is_cyclically_reduced() is True


def test_eval_u_examples(seed2):
    u = CohomologyClass.from_dict({"a1": 0.3, "b1": -0.7}, 2)
    assert eval_u(u, Word((), 2)) == 0.0
    assert eval_u(u, standard_relator(2)) == 0.0
    w = Word.parse("a1.b1.A1", 2)
    assert eval_u(u, w) == pytest.approx(-0.7)


def test_eval_u_homomorphism(rng, seed2):
    u = CohomologyClass.from_dict({"a1": 0.5, "a2": -0.2, "b2": 1.1}, 2)
    words = [w for w, _ in enumerate_ball(seed2, 3)]
    for _ in range(200):
        w1 = words[rng.integers(len(words))]
        w2 = words[rng.integers(len(words))]
        assert eval_u(u, w1.concat(w2)) == pytest.approx(
            eval_u(u, w1) + eval_u(u, w2), abs=1e-12
        )


def test_translation_length():
    m = np.diag([math.e, 1.0 / math.e])
    assert translation_length(m) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(NotHyperbolic):
        translation_length(np.eye(2))
    assert translation_length(np.linalg.inv(m)) == pytest.approx(
        translation_length(m), abs=1e-12
    )


def test_translation_length_powers(seed2):
    m = seed2.generators[0]
    t1 = translation_length(m)
    acc = np.eye(2)
    for n in range(1, 6):
        acc = acc @ m
        assert translation_length(acc) == pytest.approx(n * t1, abs=1e-9)


def test_attractive_direction_fixed(seed2):
    m = seed2.generators[0]
    th = attractive_direction(m)
    v = np.array([math.cos(th), math.sin(th)])
    mv = m @ v
    mv /= np.linalg.norm(mv)
    assert min(np.linalg.norm(mv - v), np.linalg.norm(mv + v)) < 1e-10


def test_seed_json_round_trip(seed2, tmp_path):
    path = tmp_path / "seed.json"
    seed2.save(path)
    loaded = FuchsianSeed.load(path)
    for a, b in zip(seed2.generators, loaded.generators):
        assert np.array_equal(np.asarray(a), np.asarray(b))
    d = json.loads(path.read_text())
    assert d["genus"] == 2
    assert len(d["generators"]) == 4
    assert len(d["generators"][0]) == 4


def test_seed_rejects_bad_relator():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    gens = (np.eye(2) * 1.0,) * 3 + (rot,)
    with pytest.raises(ValueError):
        FuchsianSeed(2, gens)


def test_fingerprint_sign_invariance(rng):
    m = rng.normal(size=(2, 2))
    assert matrix_fingerprint(m) == matrix_fingerprint(-m)


def test_ball_table_matches_enumeration(seed2):
    table = BallTable.build(seed2, 3)
    flat_words, flat_mats = [], []
    for w, m in enumerate_ball(seed2, 3):
        if len(w.letters):
            flat_words.append(str(w))
            flat_mats.append(m)
    got_words, got_mats = [], []
    for level in (1, 2, 3):
        got_words.extend(table.word_strings(level))
        got_mats.append(table.mats2(level))
    assert got_words == flat_words
    assert np.allclose(np.concatenate(got_mats), np.array(flat_mats), atol=1e-12)


def test_ball_table_workers_identical(seed2):
    t1 = BallTable.build(seed2, 3, workers=1)
    t2 = BallTable.build(seed2, 3, workers=2)
    for level in (1, 2, 3):
        assert np.array_equal(t1.mats2(level), t2.mats2(level))
        assert np.array_equal(t1.expsums(level), t2.expsums(level))
        assert t1.word_strings(level) == t2.word_strings(level)


def test_ball_table_expsums(seed2):
    table = BallTable.build(seed2, 3)
    strs = table.word_strings(3)
    exps = table.expsums(3)
    for i in (0, 100, 390):
        w = Word.parse(strs[i], 2)
        assert np.array_equal(w.exponent_sums(), exps[i])
