import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomlight.errors import InvalidInput, InvalidOperation, UndefinedObservable
from atomlight.maps import interact, scatter
from atomlight.measurement import build_projector, conditional_update
from atomlight.state import (
    GroupContractionWarning,
    ObservableSpec,
    SegmentLayout,
    append_light_segment,
    commutation_matrix,
    init_coherent,
    is_valid_covariance,
    observable_variance,
    remove_segments,
    squeezing_parameter,
    total_jz,
    uncertainty_min_eigenvalue,
)

AREA = 4 * np.pi * 1e-10


def layout(k=1, l=1):
    return SegmentLayout.uniform(AREA, k, l)


def test_single_segment_coherent():
    s = init_coherent(layout(), [1e6])
    np.testing.assert_array_equal(s.cov, np.diag([2.5e5, 2.5e5]))
    assert s.jx[0] == 5e5
    assert s.dim == 2
    np.testing.assert_array_equal(commutation_matrix(s), [[0, 5e5], [-5e5, 0]])


def test_split_segments_sum_to_unsegmented_variance():
    s = init_coherent(layout(1, 2), [[5e5, 5e5]])
    assert observable_variance(s, total_jz(s)) == 2.5e5


def test_small_population_warns_but_builds():
    with pytest.warns(GroupContractionWarning):
        s = init_coherent(layout(1, 2), [[50, 50]])
    assert s.dim == 4


def test_bad_populations():
    with pytest.raises(InvalidInput):
        init_coherent(layout(), [-1.0])
    with pytest.raises(InvalidInput):
        init_coherent(layout(1, 2), [1e6])
    with pytest.raises(InvalidInput):
        init_coherent(layout(2, 1), [0.0, 0.0])


def test_empty_cells_are_left_out():
    s = init_coherent(layout(2, 1), [1e6, 0.0])
    assert s.n_atom_segments == 1
    assert list(s.atom_channel) == [0]
    with pytest.raises(UndefinedObservable):
        squeezing_parameter(s, channel=1)


def test_commutation_blocks_follow_amplitudes():
    s = init_coherent(layout(1, 2), [[1e6, 2e6]])
    sig = commutation_matrix(s)
    np.testing.assert_array_equal(sig[:2, :2], [[0, 5e5], [-5e5, 0]])
    np.testing.assert_array_equal(sig[2:, 2:], [[0, 1e6], [-1e6, 0]])
    assert not np.any(sig[:2, 2:])
    s = append_light_segment(s, 1e8)
    s, _ = scatter(s, 0.1, 0.0, 1.0, 0, 2)
    assert commutation_matrix(s)[0, 1] == pytest.approx(0.9 * 5e5, rel=1e-15)


def test_append_light_is_direct_sum():
    s = init_coherent(layout(), [1e6])
    s = append_light_segment(s, 1e8)
    np.testing.assert_array_equal(s.cov[2:, 2:], np.diag([2.5e7, 2.5e7]))
    s, _ = interact(s, 1e-7, 0, 1)
    before = s.cov.copy()
    s2 = append_light_segment(append_light_segment(s, 1e8), 2e8)
    np.testing.assert_array_equal(s2.cov[:4, :4], before)
    assert not np.any(s2.cov[4:6, 6:8])
    assert not np.any(s2.cov[:4, 4:])


def test_remove_segments():
    s = init_coherent(layout(), [1e6], [1e8, 2e8])
    only = remove_segments(s, [1, 2])
    assert only.dim == 2 and only.n_light_segments == 0
    one = remove_segments(s, [1])
    np.testing.assert_array_equal(one.cov[2:, 2:], np.diag([5e7, 5e7]))
    assert one.light_number[0] == 2e8
    with pytest.raises(InvalidOperation):
        remove_segments(s, [0])
    with pytest.raises(InvalidInput):
        remove_segments(s, [5])


def test_removing_measured_segment_keeps_conditioned_atoms():
    s = init_coherent(layout(), [1e6], [1e8])
    s, _ = interact(s, 1e-7, 0, 1)
    cond = conditional_update(s, build_projector(s, [1]))
    kept = remove_segments(cond, [1])
    np.testing.assert_array_equal(kept.cov, cond.cov[:2, :2])
    assert kept.cov[1, 1] < s.cov[1, 1]


def test_observable_helpers():
    s = init_coherent(layout(1, 2), [[5e5, 5e5]])
    p = np.zeros(4)
    p[2] = 1.0
    assert observable_variance(s, ObservableSpec(p)) == s.cov[2, 2]
    with pytest.raises(InvalidInput):
        ObservableSpec(np.zeros(3))
    with pytest.raises(InvalidInput):
        observable_variance(s, np.ones(3))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(100.0, 1e7), min_size=1, max_size=8))
def test_coherent_invariants_for_any_partition(cells):
    s = init_coherent(layout(1, len(cells)), [cells])
    total = sum(cells)
    assert observable_variance(s, total_jz(s)) == pytest.approx(total / 4, rel=1e-13)
    assert squeezing_parameter(s) == pytest.approx(1.0, rel=1e-13)
    assert is_valid_covariance(s)
    # coherent states saturate the uncertainty relation
    assert uncertainty_min_eigenvalue(s) == pytest.approx(0.0, abs=1e-9 * max(cells))


def test_measurement_only_reduces_squeezing_parameter():
    s = init_coherent(layout(), [1e6], [1e8])
    s, _ = interact(s, 1e-7, 0, 1)
    s = remove_segments(conditional_update(s, build_projector(s, [1])), [1])
    assert squeezing_parameter(s) < 1.0
