"""
Contextual relative signal encodings looked up from quantized deltas.

Every encoder takes a QuantizedDelta with arbitrary leading dimensions
(..., M) and returns (..., d). The modulated variants run the same code
path as their shared-only counterparts with the scalars applied, so unit
modulation reproduces the shared-only result exactly.
"""

import numpy as np

from errors import ModeError, ShapeError

from .quantizer import QuantizedDelta
from .tables import SIGNAL_GROUP_SIZE, VM_PAIRS, CrseMode, LookupTableSet, Role


def _require_mode(tables: LookupTableSet, mode: CrseMode) -> None:
    if tables.mode is not mode:
        raise ModeError(f"tables are in {tables.mode} mode, expected {mode}")


def _check_signals(delta_q: QuantizedDelta, tables: LookupTableSet) -> None:
    if delta_q.signal_count != tables.signal_count:
        raise ShapeError(
            f"delta has {delta_q.signal_count} components, tables expect "
            f"{tables.signal_count}"
        )


def _component_rows(delta_q: QuantizedDelta, tables: LookupTableSet, role: Role):
    components = np.arange(tables.signal_count)
    return tables.shared[role][components, delta_q.q1]


def _component_scales(delta_q, tables, role, domain):
    components = np.arange(tables.signal_count)
    return tables.modulation[role, domain][components, delta_q.q1]


def _sum_components(rows: np.ndarray, scales: np.ndarray | None) -> np.ndarray:
    if scales is not None:
        rows = scales[..., None] * rows
    return rows.sum(axis=-2)


def crse_base(
    delta_q: QuantizedDelta, tables: LookupTableSet, role: Role
) -> np.ndarray:
    """Sum over components of the shared row at each component's bin."""
    _require_mode(tables, CrseMode.BASE)
    _check_signals(delta_q, tables)
    return _sum_components(_component_rows(delta_q, tables, role), None)


def crse_domain_modulated(
    delta_q: QuantizedDelta, tables: LookupTableSet, role: Role, domain: int
) -> np.ndarray:
    """Per-component shared rows scaled by the domain's modulation scalars."""
    _require_mode(tables, CrseMode.DOMAIN_MODULATED)
    _check_signals(delta_q, tables)
    tables.check_domain(domain)
    rows = _component_rows(delta_q, tables, role)
    return _sum_components(rows, _component_scales(delta_q, tables, role, domain))


def _vm_indices(delta_q: QuantizedDelta, groups: int):
    """Per (group, factor) index arrays of shape (..., G, 3)."""
    q1 = delta_q.q1.reshape(*delta_q.q1.shape[:-1], groups, SIGNAL_GROUP_SIZE)
    q2 = delta_q.q2.reshape(*delta_q.q2.shape[:-1], groups, SIGNAL_GROUP_SIZE)
    first = np.array([a for a, _ in VM_PAIRS])
    second = np.array([b for _, b in VM_PAIRS])
    return q1, q2[..., first], q2[..., second]


def _vm_factors(delta_q, tables, role, domain):
    """Vector rows, matrix rows (..., G, 3, d) and their scales (..., G, 3)."""
    if tables.signal_count % SIGNAL_GROUP_SIZE:
        raise ShapeError("VM encodings need signal components in groups of 3")
    g = tables.groups
    q1, row, col = _vm_indices(delta_q, g)
    group = np.arange(g)[:, None]
    factor = np.arange(SIGNAL_GROUP_SIZE)[None, :]
    vec = tables.vectors[role][group, factor, q1]
    mat = tables.matrices[role][group, factor, row, col]
    if domain is None:
        return vec, mat, None, None
    vec_scale = tables.vector_modulation[role, domain][group, factor, q1]
    mat_scale = tables.matrix_modulation[role, domain][group, factor, row, col]
    return vec, mat, vec_scale, mat_scale


def _contract(vec, mat, vec_scale, mat_scale) -> np.ndarray:
    if vec_scale is not None:
        vec = vec_scale[..., None] * vec
        mat = mat_scale[..., None] * mat
    terms = vec * mat
    return terms.reshape(*terms.shape[:-3], -1, terms.shape[-1]).sum(axis=-2)


def vm_crse(delta_q: QuantizedDelta, tables: LookupTableSet, role: Role) -> np.ndarray:
    """Sum over signal groups of the three cyclic vector-matrix products."""
    _require_mode(tables, CrseMode.VM)
    _check_signals(delta_q, tables)
    return _contract(*_vm_factors(delta_q, tables, role, None))


def vm_crse_domain_modulated(
    delta_q: QuantizedDelta, tables: LookupTableSet, role: Role, domain: int
) -> np.ndarray:
    _require_mode(tables, CrseMode.VM_DOMAIN_MODULATED)
    _check_signals(delta_q, tables)
    tables.check_domain(domain)
    return _contract(*_vm_factors(delta_q, tables, role, int(domain)))


def encode(
    delta_q: QuantizedDelta,
    tables: LookupTableSet,
    role: Role,
    domain: int | None = None,
) -> np.ndarray:
    """Dispatch on the table mode; ``domain`` is ignored by unmodulated modes."""
    if tables.mode is CrseMode.BASE:
        return crse_base(delta_q, tables, role)
    if tables.mode is CrseMode.DOMAIN_MODULATED:
        return crse_domain_modulated(delta_q, tables, role, domain)
    if tables.mode is CrseMode.VM:
        return vm_crse(delta_q, tables, role)
    return vm_crse_domain_modulated(delta_q, tables, role, domain)


def zero_gradients(tables: LookupTableSet) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(array) for name, array in tables.named_arrays().items()}


def accumulate_gradients(
    grads: dict[str, np.ndarray],
    delta_q: QuantizedDelta,
    tables: LookupTableSet,
    role: Role,
    upstream: np.ndarray,
    domain: int | None = None,
) -> dict[str, np.ndarray]:
    """Add d(loss)/d(entry) for every entry touched by ``encode``.

    ``upstream`` is d(loss)/d(output), shaped like the encoding (..., d).
    Entries that no delta indexes keep a zero gradient.
    """
    upstream = np.asarray(upstream, dtype=np.float64)
    mode = tables.mode
    if mode.is_modulated:
        tables.check_domain(domain)
        domain = int(domain)

    if not mode.is_vm:
        components = np.broadcast_to(np.arange(tables.signal_count), delta_q.q1.shape)
        spread = upstream[..., None, :]
        if mode.is_modulated:
            scales = _component_scales(delta_q, tables, role, domain)
            rows = _component_rows(delta_q, tables, role)
            np.add.at(
                grads["modulation"][role, domain],
                (components, delta_q.q1),
                np.einsum("...md,...d->...m", rows, upstream),
            )
            spread = scales[..., None] * spread
        np.add.at(
            grads["shared"][role],
            (components, delta_q.q1),
            np.broadcast_to(spread, (*delta_q.q1.shape, tables.d)),
        )
        return grads

    vec, mat, vec_scale, mat_scale = _vm_factors(
        delta_q, tables, role, domain if mode.is_modulated else None
    )
    q1, row, col = _vm_indices(delta_q, tables.groups)
    shape = q1.shape
    group = np.broadcast_to(np.arange(tables.groups)[:, None], shape)
    factor = np.broadcast_to(np.arange(SIGNAL_GROUP_SIZE)[None, :], shape)
    spread = upstream[..., None, None, :]
    if vec_scale is None:
        d_vec = mat * spread
        d_mat = vec * spread
    else:
        scaled_vec = vec_scale[..., None] * vec
        scaled_mat = mat_scale[..., None] * mat
        d_vec = vec_scale[..., None] * scaled_mat * spread
        d_mat = mat_scale[..., None] * scaled_vec * spread
        np.add.at(
            grads["vector_modulation"][role, domain],
            (group, factor, q1),
            np.sum(vec * scaled_mat * spread, axis=-1),
        )
        np.add.at(
            grads["matrix_modulation"][role, domain],
            (group, factor, row, col),
            np.sum(scaled_vec * mat * spread, axis=-1),
        )
    np.add.at(grads["vectors"][role], (group, factor, q1), d_vec)
    np.add.at(grads["matrices"][role], (group, factor, row, col), d_mat)
    return grads
