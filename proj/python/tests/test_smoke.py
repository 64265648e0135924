import random

import pytest

import rangemax

P5_TEXT = "5\n0 2 3\n1 4 0\n2 1 4\n3 0 2\n4 3 1\n"


def test_five_points():
    ps = rangemax.PointSet.from_text(P5_TEXT)
    idx = rangemax.Index.build(ps)
    assert idx.query(0, 0, 2, 2) == (2, 1, 4)
    assert idx.query() == (2, 1, 4)
    assert idx.query(3, 3, 1, 1) is None
    assert ps.to_text() == P5_TEXT


def test_matches_brute_force():
    ps = rangemax.PointSet.random(500, seed=3)
    idx = rangemax.Index.build(ps)
    rng = random.Random(5)
    for _ in range(2000):
        x1, x2 = sorted(rng.randrange(500) for _ in range(2))
        y1, y2 = sorted(rng.randrange(500) for _ in range(2))
        sides = [x1, y1, x2, y2]
        if rng.random() < 0.5:
            sides[rng.randrange(4)] = None
        assert idx.query(*sides) == ps.brute_force(*sides)


def test_bytes_round_trip(tmp_path):
    ps = rangemax.PointSet.random(300, seed=9)
    idx = rangemax.Index.build(ps)
    data = idx.to_bytes()
    assert data[:4] == b"RMXI"
    assert rangemax.Index.build(ps).to_bytes() == data
    back = rangemax.Index.from_bytes(data)
    assert back == idx
    path = tmp_path / "a.idx"
    idx.save(str(path))
    assert rangemax.Index.load(str(path)).query(0, 0, 100, 100) == idx.query(0, 0, 100, 100)
    with pytest.raises(rangemax.FormatError):
        rangemax.Index.from_bytes(b"XXXX" + data[4:])


def test_reports():
    ps = rangemax.PointSet.random(1024, seed=1)
    assert ps.entropy_code_bits() <= 3 * 1024
    idx = rangemax.Index.build(ps)
    assert "check,reconciles,1,1,true" in idx.space_report()
    stats = idx.query_stats(10, 10, 900, 900)
    assert stats["candidates"] <= 13 * (idx.depth + 1) + 1


def test_bad_points():
    with pytest.raises(rangemax.FormatError, match="line 3"):
        rangemax.PointSet.from_text("2\n0 0 0\n1 0 1\n")
    with pytest.raises(ValueError):
        rangemax.PointSet([0, 0], [0, 1])
