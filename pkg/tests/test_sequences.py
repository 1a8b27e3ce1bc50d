import json

import pytest
from hypothesis import given, settings, strategies as st

from extremal.exact import Mat2, Point3, det2, det3
from extremal.sequences import (
    IdentityError, PointSeq, SeedError, SeedSpec, check_recurrence, third_coord_check, eta_matrix,
    fib_matrix, fib_seed, fibonacci_word, generate, lemma26_offdiag_check, lemma26_trace_check,
    seed_Ea, symmetric_prefixes, transport, verify_all,
)

from test_exact import naive_mul


def substitution_oracle(n):
    w = "a"
    while len(w) < n:
        w = "".join("ab" if c == "a" else "a" for c in w)
    return list(w[:n])


def test_fibonacci_word_examples():
    assert fibonacci_word(1) == ["a"]
    assert fibonacci_word(7) == list("abaabab")
    assert fibonacci_word(13) == list("abaababaabaab")
    assert fibonacci_word(5, 1, 2) == [1, 2, 1, 1, 2]


@given(st.integers(1, 400))
def test_fibonacci_word_matches_substitution(n):
    assert fibonacci_word(n) == substitution_oracle(n)


def test_fibonacci_word_letter_counts():
    fib = [1, 2]
    while len(fib) < 15:
        fib.append(fib[-1] + fib[-2])
    for i in range(2, 14):
        w = fibonacci_word(fib[i])
        assert w.count("a") == fib[i - 1]
        assert w.count("b") == fib[i - 2]


def test_fib_matrix():
    assert fib_matrix(1, 2) == Mat2(3, 1, 2, 1)
    assert fib_matrix(2, 1) == Mat2(3, 2, 1, 1)
    assert fib_matrix(1, 3) == Mat2(4, 1, 3, 1)
    assert fib_matrix(1, 2) == Mat2(1, 1, 1, 0) @ Mat2(2, 1, 1, 0)
    with pytest.raises(SeedError):
        fib_matrix(2, 2)


def test_fib_seed_scan():
    assert fib_seed(1, 2) == (Point3(1, 1, 0), Point3(4, 3, 2))
    pref = symmetric_prefixes(1, 2, 12)
    assert [n for n, _ in pref] == [1, 3, 6, 11]
    third = pref[2][1]
    assert third == Point3(25, 18, 13)
    M = fib_matrix(1, 2)
    assert (Point3(4, 3, 2).to_mat() @ M @ Point3(1, 1, 0).to_mat()).to_point() == third
    assert fib_seed(2, 1)[0] == Point3(2, 1, 0)


def test_fib_seed_scan_limit():
    # prefixes of length 1 and 3 are palindromes, so three letters always suffice
    assert fib_seed(5, 2, scan_limit=3) == tuple(p for _, p in symmetric_prefixes(5, 2, 3))
    with pytest.raises(ValueError):
        fib_seed(1, 2, scan_limit=2)


def test_seed_Ea_values():
    x1, x2, M = seed_Ea(1)
    assert (x1, x2, M) == (Point3(1, 1, 0), Point3(3, 1, 0), Mat2(1, 1, -1, 0))
    _, x2, _ = seed_Ea(2)
    assert x2 == Point3(12, 7, 4)
    assert det2(x2) == -1
    with pytest.raises(SeedError):
        seed_Ea(0)


def naive_generate(x1, x2, M, K):
    pts = [x1.to_mat(), x2.to_mat()]
    for k in range(1, K - 1):
        S = M if k % 2 else Mat2(M.e00, M.e10, M.e01, M.e11)
        pts.append(naive_mul(naive_mul(pts[k], S), pts[k - 1]))
    return [Point3(p.e00, p.e01, p.e11) for p in pts]


def test_generate_Ea1_first_points():
    seq = generate(SeedSpec.Ea(1), 4)
    assert seq.x(3) == Point3(5, 2, 1)
    assert seq.x(4) == Point3(16, 7, 3)
    assert list(seq.points) == naive_generate(*seed_Ea(1), 4)


def test_generate_fib12_third_point():
    assert generate(SeedSpec.fibonacci(1, 2), 3).x(3) == Point3(25, 18, 13)


def test_generate_K2_returns_seed():
    seed = SeedSpec.Ea(3)
    assert generate(seed, 2).points == (seed.x1, seed.x2)


@pytest.mark.parametrize("label", ["ea:1", "ea:2", "ea:3", "fib:1,2", "fib:2,1", "fib:1,3", "eta:1", "eta:2"])
def test_generate_matches_naive(label):
    seed = SeedSpec.parse(label)
    seq = generate(seed, 14)
    assert list(seq.points) == naive_generate(seed.x1, seed.x2, seed.M, 14)


def test_generate_rejects_bad_seed():
    bad = SeedSpec.Ea(1)
    object.__setattr__(bad, "x2", Point3(1, 0, 1))  # x3 = M x1 is not symmetric
    with pytest.raises(IdentityError) as e:
        generate(bad, 6)
    assert (e.value.what, e.value.k) == ("symmetry", 3)
    object.__setattr__(bad, "x2", Point3(2, 0, 1))
    with pytest.raises(IdentityError) as e:
        generate(bad, 4)
    assert e.value.what == "unimodularity" and e.value.k == 2


def test_trace_check_Ea1_k2():
    rows = lemma26_trace_check(generate(SeedSpec.Ea(1), 6))
    assert rows[0] == {"k": 2, "t": 3, "eps": 1}


@pytest.mark.parametrize("a", [1, 2, 3, 5])
def test_trace_is_a_times_x0_for_Ea(a):
    seq = generate(SeedSpec.Ea(a), 10)
    for row in lemma26_trace_check(seq):
        assert row["t"] == a * seq.x(row["k"]).x0


def test_offdiag_check_Ea1_k2():
    rows = lemma26_offdiag_check(generate(SeedSpec.Ea(1), 5))
    assert rows[0] == {"k": 2, "lhs": 3, "s1": 1, "s2": 1}


def test_third_coordinate_recurrence_Ea1():
    seq = generate(SeedSpec.Ea(1), 8)
    rows = third_coord_check(seq)
    # k=2: x_{4,2} = 1 * x_{2,0} * x_{3,2} + x_{1,2}, i.e. 3 = 3 * 1 + 0
    assert seq.x(4).x2 == 3 and rows[0]["k"] == 2
    with pytest.raises(ValueError):
        third_coord_check(generate(SeedSpec.fibonacci(1, 2), 6))


def test_sign_relation_from_determinants():
    seq = generate(SeedSpec.Ea(1), 10)
    lemma26_trace_check(seq)
    for k, eps in seq.sign_log["trace"].items():
        assert eps == -det2(seq.x(k)) * det2(seq.S(k - 1))


def test_broken_sequence_detected():
    seq = generate(SeedSpec.Ea(2), 8)
    pts = list(seq.points)
    pts[5] = pts[5] + Point3(1, 0, 0)
    broken = PointSeq(seq.seed, tuple(pts))
    with pytest.raises(IdentityError):
        lemma26_trace_check(broken)
    with pytest.raises(IdentityError):
        check_recurrence(broken)


@pytest.mark.parametrize("label", ["ea:1", "ea:2", "fib:1,2", "fib:2,1", "fib:3,5", "eta:1", "eta:3"])
def test_exact_identities_and_norm_growth(label):
    seq = generate(SeedSpec.parse(label), 16)
    verify_all(seq)
    d3 = {abs(det3(seq.x(k), seq.x(k + 1), seq.x(k + 2))) for k in range(2, 15)}
    assert len(d3) == 1 and 0 not in d3
    norms = [p.norm() for p in seq.points]
    assert all(norms[k] < norms[k + 1] for k in range(1, 15))


def test_transport_identity_is_noop():
    seq = generate(SeedSpec.Ea(2), 8)
    moved = transport(seq, Mat2.identity())
    assert moved.points == tuple(p.normalized() for p in seq.points[:2]) + seq.points[2:] \
        or all(a in (b, -b) for a, b in zip(moved.points, seq.points))
    assert moved.M == seq.M


@pytest.mark.parametrize("m", [1, 2, 3])
def test_transport_fibonacci_lands_in_class_one(m):
    seq = generate(SeedSpec.fibonacci(m, m + 2), 10)
    moved = transport(seq, eta_matrix(m))
    assert moved.M == Mat2(1, 1, -1, 0)
    for p in moved.points:
        assert p.to_mat().T == p.to_mat()
        assert det2(p) in (1, -1)
    check_recurrence(moved)


def test_transport_rejects_singular():
    with pytest.raises(SeedError):
        transport(generate(SeedSpec.Ea(1), 5), Mat2(2, 0, 0, 1))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([Mat2(0, -1, -1, 2), Mat2(1, 1, 0, 1), Mat2(2, 1, 1, 1), Mat2(1, 0, 3, 1)]),
       st.sampled_from(["ea:1", "fib:1,2", "fib:2,5"]))
def test_transport_preserves_structure(C, label):
    moved = transport(generate(SeedSpec.parse(label), 9), C)
    verify_all(moved)


def test_seed_parse():
    assert SeedSpec.parse("ea:2").M == Mat2(2, 1, -1, 0)
    assert SeedSpec.parse("fib:1,2").M == Mat2(3, 1, 2, 1)
    assert SeedSpec.parse("eta:1").M == Mat2(1, 1, -1, 0)
    for bad in ["ea", "fib:1", "xx:1", "fib:3,3", "ea:0", "eta:0", "fib:a,b"]:
        with pytest.raises(SeedError):
            SeedSpec.parse(bad)


@pytest.mark.parametrize("label", ["ea:1", "fib:1,2", "eta:2"])
def test_json_roundtrip(label):
    seq = generate(SeedSpec.parse(label), 9)
    verify_all(seq)
    text = seq.to_json()
    back = PointSeq.from_json(text)
    assert back.points == seq.points
    assert back.seed.M == seq.M
    assert back.sign_log == seq.sign_log
    doc = json.loads(text)
    assert doc["format"] == "extremal.sequence/1"
    assert all(isinstance(c, str) for p in doc["points"] for c in p)
    assert back.to_json() == text
