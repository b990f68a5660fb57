"""
Window attention forward passes: tiled two-pass softmax and a dense reference.
"""

import numpy as np

from crse import LookupTableSet, Role, encode
from errors import NumericsError, RangeError

from .config import AttentionConfig, AttentionWindow, ProjectionSet
from .scores import (
    ScoreSupplier,
    attention_scores,
    check_inputs,
    chunks,
    project_prompts,
)


def prompt_array(prompts, config: AttentionConfig) -> np.ndarray:
    if prompts is None:
        return np.zeros((0, config.d))
    return np.asarray(prompts, dtype=np.float64)


def _merge(running_max, running_sum, scores):
    new_max = np.maximum(running_max, scores.max(axis=-1))
    running_sum = running_sum * np.exp(running_max - new_max)
    running_sum += np.exp(scores - new_max[..., None]).sum(axis=-1)
    return new_max, running_sum


def softmax_statistics(
    supplier: ScoreSupplier, rows: np.ndarray, prompt_keys: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per (row, head) maximum score and sum of exp(score - max) over all
    real voxels and prompts, computed one key tile at a time."""
    shape = (len(rows), supplier.config.heads)
    running_max = np.full(shape, -np.inf)
    running_sum = np.zeros(shape)
    for cols in chunks(len(supplier.window), supplier.config.block_size):
        running_max, running_sum = _merge(
            running_max, running_sum, supplier.tile(rows, cols)
        )
    if prompt_keys.shape[0]:
        running_max, running_sum = _merge(
            running_max, running_sum, supplier.prompt_tile(rows, prompt_keys)
        )
    return running_max, running_sum


def window_attention_forward(
    window: AttentionWindow,
    prompts: np.ndarray | None,
    proj: ProjectionSet,
    tables: LookupTableSet,
    config: AttentionConfig,
    domain: int | None = None,
) -> np.ndarray:
    """Attention output f*_i for every real voxel, shape (N, d).

    Two passes per query tile: the first gathers softmax statistics, the
    second accumulates weighted values. Auxiliary memory is bounded by the
    tile size rather than N squared.
    """
    prompts = prompt_array(prompts, config)
    check_inputs(window, tables, config, domain, prompts)
    supplier = attention_scores(window, proj, tables, config, domain)
    prompt_keys, prompt_values = project_prompts(prompts, proj, config)

    n = len(window)
    output = np.zeros((n, config.heads, config.head_dim))
    for rows in chunks(n, config.block_size):
        row_max, row_sum = softmax_statistics(supplier, rows, prompt_keys)
        accumulated = np.zeros((len(rows), config.heads, config.head_dim))
        for cols in chunks(n, config.block_size):
            _, (t_q, t_k, t_v) = supplier.encodings(rows, cols)
            weights = np.exp(supplier.tile(rows, cols, t_q, t_k) - row_max[..., None])
            weights /= row_sum[..., None]
            values = supplier.v[cols][None, :, :, :] + t_v
            accumulated += np.einsum("rhc,rchx->rhx", weights, values)
        if prompts.shape[0]:
            prompt_scores = supplier.prompt_tile(rows, prompt_keys)
            weights = np.exp(prompt_scores - row_max[..., None])
            weights /= row_sum[..., None]
            accumulated += np.einsum("rhb,bhx->rhx", weights, prompt_values)
        output[rows] = accumulated
    return output.reshape(n, config.d)


def window_attention_reference(
    window: AttentionWindow,
    prompts: np.ndarray | None,
    proj: ProjectionSet,
    tables: LookupTableSet,
    config: AttentionConfig,
    domain: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Dense evaluation: full score matrix and explicit softmax.

    Returns the output (N, d) and the weights (H, N, N + B); columns past N
    belong to the prompts.
    """
    prompts = prompt_array(prompts, config)
    check_inputs(window, tables, config, domain, prompts)
    n, heads, width = len(window), config.heads, config.head_dim

    def per_head(x):
        return x.reshape(*x.shape[:-1], heads, width)

    f = window.features
    q, k, v = per_head(f @ proj.q), per_head(f @ proj.k), per_head(f @ proj.v)
    delta_q = window.deltas()
    t_q, t_k, t_v = (
        per_head(encode(delta_q, tables, role, domain))
        for role in (Role.Q, Role.K, Role.V)
    )

    scores = np.einsum("ihx,ijhx->hij", q, k[None] + t_k)
    scores += np.einsum("jhx,ijhx->hij", k, t_q)
    prompt_keys, prompt_values = project_prompts(prompts, proj, config)
    prompt_scores = np.einsum("ihx,bhx->hib", q, prompt_keys)
    scores = np.concatenate([scores, prompt_scores], axis=-1) * config.scale
    if not np.all(np.isfinite(scores)):
        raise NumericsError("non-finite attention score")

    weights = np.exp(scores - scores.max(axis=-1, keepdims=True))
    weights /= weights.sum(axis=-1, keepdims=True)
    output = np.einsum("hij,ijhx->ihx", weights[..., :n], v[None] + t_v)
    output += np.einsum("hib,bhx->ihx", weights[..., n:], prompt_values)
    return output.reshape(n, config.d), weights


def prompt_attention_mass(
    window: AttentionWindow,
    prompts: np.ndarray,
    proj: ProjectionSet,
    tables: LookupTableSet,
    config: AttentionConfig,
    domain: int | None = None,
) -> np.ndarray:
    """Fraction of each voxel's softmax mass that lands on prompts, averaged
    over heads; shape (N,)."""
    prompts = prompt_array(prompts, config)
    if prompts.shape[0] == 0:
        raise RangeError("prompt attention mass needs at least one prompt")
    check_inputs(window, tables, config, domain, prompts)
    supplier = attention_scores(window, proj, tables, config, domain)
    prompt_keys, _ = project_prompts(prompts, proj, config)

    mass = np.zeros(len(window))
    for rows in chunks(len(window), config.block_size):
        row_max, row_sum = softmax_statistics(supplier, rows, prompt_keys)
        prompt_scores = supplier.prompt_tile(rows, prompt_keys)
        on_prompts = np.exp(prompt_scores - row_max[..., None]).sum(axis=-1)
        mass[rows] = (on_prompts / row_sum).mean(axis=-1)
    return mass
