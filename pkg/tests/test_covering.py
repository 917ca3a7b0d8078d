import io
import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from falsitav.covering import (
    CoveringArray,
    CoveringArrayError,
    count_t_way_combinations,
    generate,
    read_ca_csv,
    verify_coverage,
    write_ca_csv,
)

URBAN_DOMAINS = (5,) * 12 + (2, 4, 4, 4)


def test_pair_counts():
    assert count_t_way_combinations(2, URBAN_DOMAINS) == 2562
    assert count_t_way_combinations(1, (3, 4)) == 7
    assert count_t_way_combinations(2, (2, 2, 2)) == 12


@pytest.mark.parametrize("t, domains", [(0, (2, 2)), (3, (2, 2)), (1, ())])
def test_count_rejects_bad_strength(t, domains):
    with pytest.raises(CoveringArrayError):
        count_t_way_combinations(t, domains)


def test_orthogonal_array_covers_binary_triple():
    ca = CoveringArray(2, (2, 2, 2), ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)))
    assert verify_coverage(ca) == []


def test_generated_binary_triple():
    ca = generate(2, (2, 2, 2), seed=3)
    assert len(ca) >= 4 and verify_coverage(ca) == []


def test_single_row_misses_nine():
    assert len(verify_coverage(CoveringArray(2, (2, 2, 2), ((0, 0, 0),)))) == 9


def test_exhaustive_when_strength_equals_k():
    ca = generate(3, (2, 3, 2))
    assert len(ca) == 12 and verify_coverage(ca) == []
    assert verify_coverage(CoveringArray(2, (2, 2), tuple(itertools.product(range(2), range(2))))) == []


def test_urban_instance():
    ca = generate(2, URBAN_DOMAINS, seed=0)
    assert verify_coverage(ca) == []
    assert len(ca) <= 60


def test_generation_errors():
    with pytest.raises(CoveringArrayError):
        generate(2, (2, 1, 3))
    with pytest.raises(CoveringArrayError):
        generate(4, (2, 2, 2))
    with pytest.raises(CoveringArrayError):
        verify_coverage(CoveringArray(1, (2,), ((2,),)))


@settings(max_examples=25)
@given(st.integers(1, 3), st.lists(st.integers(2, 6), min_size=1, max_size=8), st.integers(0, 100))
def test_generate_always_covers(t, domains, seed):
    t = min(t, len(domains))
    ca = generate(t, domains, seed=seed)
    assert verify_coverage(ca) == []
    assert all(len(r) == len(domains) for r in ca.rows)
    if t == len(domains):
        assert len(ca) == math.prod(domains)
    for lower in range(1, t):
        assert verify_coverage(CoveringArray(lower, ca.domains, ca.rows)) == []


def test_seed_determinism():
    assert generate(2, (3, 4, 2, 5), seed=7) == generate(2, (3, 4, 2, 5), seed=7)


def test_csv_round_trip(tmp_path):
    ca = generate(2, (3, 2, 4), seed=1)
    buf = io.StringIO()
    write_ca_csv(ca, buf)
    assert buf.getvalue().splitlines()[0] == "p1,p2,p3"
    assert read_ca_csv(io.StringIO(buf.getvalue()), 2, (3, 2, 4)) == ca
    p = tmp_path / "ca.csv"
    write_ca_csv(ca, p)
    assert read_ca_csv(p, 2).rows == ca.rows
