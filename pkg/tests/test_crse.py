import itertools
from dataclasses import replace

import numpy as np
import pytest

from crse import (
    ROLES,
    VM_PAIRS,
    CrseMode,
    QuantizedDelta,
    QuantizerSpec,
    Role,
    bin_centers,
    create_tables,
    crse_base,
    crse_domain_modulated,
    encode,
    init_tables,
    load_tables,
    modulation_param_count,
    quantize,
    quantize_delta,
    save_tables,
    vm_crse,
    vm_crse_domain_modulated,
)
from errors import ConfigError, DomainError, ModeError, ParseError, ShapeError


def symmetric(divisions=16, m=1):
    return QuantizerSpec(-np.ones(m), np.ones(m), divisions, 4)


def random_bins(rng, count, tables):
    q1 = rng.integers(0, tables.divisions_1d, (count, tables.signal_count))
    q2 = rng.integers(0, tables.divisions_2d, (count, tables.signal_count))
    return QuantizedDelta.from_bins(q1, q2)


def with_random(tables, rng, modulation=None):
    arrays = {n: rng.normal(size=a.shape) for n, a in tables.shared_arrays().items()}
    if modulation is not None:
        arrays.update({n: modulation(a) for n, a in tables.modulation_arrays().items()})
    return replace(tables, **arrays)


def test_quantize_midpoint_and_clamps():
    spec = symmetric()
    assert quantize([0.0], spec)[0] == 8
    assert quantize([1.0], spec)[0] == 15
    assert quantize([5.0], spec)[0] == 15
    assert quantize([-7.0], spec)[0] == 0


def test_quantize_is_monotone_and_idempotent_on_centers():
    spec = symmetric()
    deltas = np.linspace(-1.5, 1.5, 1001)[:, None]
    bins = quantize(deltas, spec)[:, 0]
    assert np.all(np.diff(bins) >= 0)
    centers = bin_centers(spec)[0]
    np.testing.assert_array_equal(quantize(centers[:, None], spec)[:, 0], np.arange(16))


def test_quantize_uniform_samples_fill_bins_evenly(rng):
    spec = symmetric()
    bins = quantize(rng.uniform(-1.0, 1.0, (100_000, 1)), spec)[:, 0]
    counts = np.bincount(bins, minlength=16)
    assert np.all(np.abs(counts / 100_000 - 1 / 16) < 0.005)


def test_window_bounds():
    spec = QuantizerSpec.for_window(5, 0.02)
    np.testing.assert_allclose(spec.upper[:3], 0.08)
    np.testing.assert_array_equal(spec.upper[3:6], 1.0)
    np.testing.assert_array_equal(spec.upper[6:], 2.0)
    np.testing.assert_array_equal(spec.lower, -spec.upper)
    with pytest.raises(ConfigError):
        QuantizerSpec([0.0], [0.0])


def test_zero_delta_lands_in_center_bins():
    delta_q = quantize_delta(np.zeros(9), QuantizerSpec.for_window(5, 0.02))
    assert np.all(delta_q.q1 == 8)
    assert np.all(delta_q.q2 == 2)


def test_base_sums_component_rows(rng):
    tables = with_random(create_tables(CrseMode.BASE, 6), rng)
    delta_q = random_bins(rng, 50, tables)
    for role in ROLES:
        expected = np.zeros((50, 6))
        for m in range(9):
            expected += tables.shared[role, m, delta_q.q1[:, m]]
        actual = crse_base(delta_q, tables, role)
        np.testing.assert_allclose(actual, expected, atol=1e-12)


def test_base_single_component_returns_row(rng):
    tables = with_random(create_tables(CrseMode.BASE, 4, signal_count=1), rng)
    out = crse_base(QuantizedDelta.from_bins([[3]]), tables, Role.K)
    np.testing.assert_array_equal(out[0], tables.shared[Role.K, 0, 3])


def test_zero_tables_give_zero(rng):
    for mode in CrseMode:
        tables = create_tables(mode, 4, domains=2)
        delta_q = random_bins(rng, 10, tables)
        assert not np.any(encode(delta_q, tables, Role.Q, 1))


def test_mode_and_domain_errors(rng):
    tables = create_tables(CrseMode.DOMAIN_MODULATED, 4, domains=2)
    delta_q = random_bins(rng, 3, tables)
    with pytest.raises(ModeError):
        crse_base(delta_q, tables, Role.Q)
    with pytest.raises(DomainError):
        crse_domain_modulated(delta_q, tables, Role.Q, 2)
    with pytest.raises(ShapeError):
        crse_domain_modulated(QuantizedDelta.from_bins([[0, 0]]), tables, Role.Q, 0)
    with pytest.raises(ShapeError):
        create_tables(CrseMode.VM, 4, signal_count=4)


def test_modulation_scales_linearly(rng):
    base = with_random(create_tables(CrseMode.BASE, 5), rng)
    tables = replace(
        create_tables(CrseMode.DOMAIN_MODULATED, 5, domains=2), shared=base.shared
    )
    delta_q = random_bins(rng, 20, tables)
    reference = crse_base(delta_q, base, Role.V)
    doubled = replace(tables, modulation=np.full_like(tables.modulation, 2.0))
    zeroed = replace(tables, modulation=np.zeros_like(tables.modulation))
    doubled_out = crse_domain_modulated(delta_q, doubled, Role.V, 1)
    np.testing.assert_array_equal(doubled_out, 2 * reference)
    assert not np.any(crse_domain_modulated(delta_q, zeroed, Role.V, 0))


@pytest.mark.parametrize(
    ("plain", "modulated"),
    [
        (CrseMode.BASE, CrseMode.DOMAIN_MODULATED),
        (CrseMode.VM, CrseMode.VM_DOMAIN_MODULATED),
    ],
)
def test_unit_modulation_collapses_bitwise(rng, plain, modulated):
    shared = init_tables(create_tables(plain, 8), seed=3)
    tables = init_tables(create_tables(modulated, 8, domains=2), seed=3)
    np.testing.assert_array_equal(
        tables.shared_parameter_count(), shared.shared_parameter_count()
    )
    for name, array in shared.shared_arrays().items():
        np.testing.assert_array_equal(getattr(tables, name), array)
    delta_q = random_bins(rng, 10_000, tables)
    for role in ROLES:
        for domain in (0, 1):
            np.testing.assert_array_equal(
                encode(delta_q, tables, role, domain), encode(delta_q, shared, role)
            )


def vm_tensor(tables, role, group):
    """Every T^3 entry of one group's encoding, assembled factor by factor."""
    t = tables.divisions_1d
    tensor = np.zeros((t, t, t, tables.d))
    for triple in itertools.product(range(t), repeat=3):
        terms = [
            tables.vectors[role, group, k, triple[k]]
            * tables.matrices[role, group, k, triple[row], triple[col]]
            for k, (row, col) in enumerate(VM_PAIRS)
        ]
        tensor[triple] = terms[0] + terms[1] + terms[2]
    return tensor


def test_vm_matches_materialized_tensor(rng):
    # quarter-integer entries keep every product and sum exact
    tables = create_tables(
        CrseMode.VM, 3, signal_count=3, divisions_1d=4, divisions_2d=4
    )
    tables = replace(
        tables,
        vectors=rng.integers(-8, 9, tables.vectors.shape) / 4.0,
        matrices=rng.integers(-8, 9, tables.matrices.shape) / 4.0,
    )
    triples = np.array(list(itertools.product(range(4), repeat=3)))
    delta_q = QuantizedDelta.from_bins(triples)
    for role in ROLES:
        tensor = vm_tensor(tables, role, 0)
        expected = tensor[triples[:, 0], triples[:, 1], triples[:, 2]]
        np.testing.assert_array_equal(vm_crse(delta_q, tables, role), expected)


def test_vm_sums_groups(rng):
    tables = create_tables(CrseMode.VM, 2, divisions_1d=4, divisions_2d=4)
    tables = with_random(tables, rng)
    delta_q = QuantizedDelta.from_bins(rng.integers(0, 4, (30, 9)))
    expected = np.zeros((30, 2))
    for group in range(3):
        tensor = vm_tensor(tables, Role.Q, group)
        q = delta_q.q1[:, 3 * group : 3 * group + 3]
        expected += tensor[q[:, 0], q[:, 1], q[:, 2]]
    np.testing.assert_allclose(vm_crse(delta_q, tables, Role.Q), expected, atol=1e-12)


def test_vm_unit_vectors_sum_matrix_rows(rng):
    tables = create_tables(CrseMode.VM, 2, signal_count=3)
    tables = replace(
        tables,
        vectors=np.ones_like(tables.vectors),
        matrices=rng.normal(size=tables.matrices.shape),
    )
    out = vm_crse(QuantizedDelta.from_bins([[5, 6, 7]], [[1, 2, 3]]), tables, Role.K)
    m = tables.matrices[Role.K, 0]
    np.testing.assert_allclose(out[0], m[0, 2, 3] + m[1, 3, 1] + m[2, 1, 2])


def test_vm_zeroed_vector_scale_drops_its_term(rng):
    tables = with_random(
        create_tables(CrseMode.VM_DOMAIN_MODULATED, 3, signal_count=3, domains=2), rng,
        modulation=np.ones_like,
    )
    vector_modulation = tables.vector_modulation.copy()
    vector_modulation[Role.Q, 1, 0, 0] = 0.0
    tables = replace(tables, vector_modulation=vector_modulation)
    q1, q2 = np.array([[2, 9, 4]]), np.array([[0, 3, 1]])
    delta_q = QuantizedDelta.from_bins(q1, q2)
    out = vm_crse_domain_modulated(delta_q, tables, Role.Q, 1)
    v, m = tables.vectors[Role.Q, 0], tables.matrices[Role.Q, 0]
    expected = v[1, 9] * m[1, 1, 0] + v[2, 4] * m[2, 0, 3]
    np.testing.assert_allclose(out[0], expected, atol=1e-12)
    assert not np.array_equal(out, vm_crse_domain_modulated(delta_q, tables, Role.Q, 0))


def test_modulation_parameter_counts():
    assert modulation_param_count(9, 2, 16, CrseMode.DOMAIN_MODULATED) == 864
    assert modulation_param_count(9, 1, 16, CrseMode.DOMAIN_MODULATED) == 432
    assert modulation_param_count(9, 2, 16, CrseMode.VM_DOMAIN_MODULATED, 4) == 1728
    assert modulation_param_count(9, 2, 16, CrseMode.BASE) == 0
    dm = create_tables(CrseMode.DOMAIN_MODULATED, 8, domains=2)
    vm_dm = create_tables(CrseMode.VM_DOMAIN_MODULATED, 8, domains=2)
    assert dm.modulation_parameter_count() == 864
    assert vm_dm.modulation_parameter_count() == 1728


def test_init_tables_statistics_and_determinism():
    a = init_tables(create_tables(CrseMode.BASE, 256, divisions_1d=16), seed=9)
    b = init_tables(create_tables(CrseMode.BASE, 256, divisions_1d=16), seed=9)
    np.testing.assert_array_equal(a.shared, b.shared)
    assert abs(a.shared.mean()) < 0.01
    assert a.shared.var() == pytest.approx(0.02, rel=0.05)
    dm = init_tables(create_tables(CrseMode.DOMAIN_MODULATED, 4, domains=3), seed=1)
    assert np.all(dm.modulation == 1.0)


@pytest.mark.parametrize("mode", list(CrseMode))
def test_tables_file_round_trip(tmp_path, mode):
    tables = init_tables(create_tables(mode, 4, domains=2, divisions_1d=8), seed=2)
    path = save_tables(tables, tmp_path / "tables.bin")
    assert path.read_bytes()[:4] == b"CRSE"
    loaded = load_tables(path)
    assert loaded.mode is mode
    for name, array in tables.named_arrays().items():
        np.testing.assert_array_equal(getattr(loaded, name), array)


def test_tables_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(ParseError):
        load_tables(path)


@pytest.mark.parametrize("cut", [3, 8])
def test_tables_file_rejects_truncated_payload(tmp_path, cut):
    tables = init_tables(create_tables(CrseMode.BASE, 4, divisions_1d=8), seed=2)
    path = save_tables(tables, tmp_path / "tables.bin")
    path.write_bytes(path.read_bytes()[:-cut])
    with pytest.raises(ParseError):
        load_tables(path)
