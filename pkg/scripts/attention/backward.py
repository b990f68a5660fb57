"""
Analytic gradients of the window attention output.
"""

from dataclasses import dataclass

import numpy as np

from crse import LookupTableSet, Role, accumulate_gradients, zero_gradients

from .config import AttentionConfig, AttentionWindow, ProjectionSet
from .forward import prompt_array, softmax_statistics, window_attention_forward
from .scores import attention_scores, check_inputs, chunks, project_prompts


@dataclass(frozen=True, eq=False)
class AttentionGradients:
    features: np.ndarray
    q: np.ndarray
    k: np.ndarray
    v: np.ndarray
    prompts: np.ndarray
    tables: dict[str, np.ndarray]

    def named_arrays(self) -> dict[str, np.ndarray]:
        arrays = {
            "features": self.features,
            "projections.q": self.q,
            "projections.k": self.k,
            "projections.v": self.v,
            "prompts": self.prompts,
        }
        arrays.update({f"tables.{n}": a for n, a in self.tables.items()})
        return arrays


def window_attention_backward(
    window: AttentionWindow,
    prompts: np.ndarray | None,
    proj: ProjectionSet,
    tables: LookupTableSet,
    config: AttentionConfig,
    upstream: np.ndarray,
    domain: int | None = None,
    output: np.ndarray | None = None,
) -> AttentionGradients:
    """Gradients of sum(upstream * output) w.r.t. every attention input.

    Softmax statistics are recomputed tile by tile. ``output`` is the forward
    result; it is recomputed when not supplied.
    """
    prompts = prompt_array(prompts, config)
    check_inputs(window, tables, config, domain, prompts)
    if output is None:
        output = window_attention_forward(window, prompts, proj, tables, config, domain)
    supplier = attention_scores(window, proj, tables, config, domain)
    prompt_keys, prompt_values = project_prompts(prompts, proj, config)

    n, heads, width = len(window), config.heads, config.head_dim
    scale = config.scale
    upstream = np.asarray(upstream, dtype=np.float64).reshape(n, heads, width)
    output = np.asarray(output, dtype=np.float64).reshape(n, heads, width)
    q, k = supplier.q, supplier.k

    d_q = np.zeros_like(q)
    d_k = np.zeros_like(k)
    d_v = np.zeros_like(supplier.v)
    d_prompt_keys = np.zeros_like(prompt_keys)
    d_prompt_values = np.zeros_like(prompt_values)
    table_grads = zero_gradients(tables)

    for rows in chunks(n, config.block_size):
        row_max, row_sum = softmax_statistics(supplier, rows, prompt_keys)
        grad_rows = upstream[rows]
        # sum_j a_ij (upstream_i . value_ij) equals upstream_i . output_i
        row_dot = np.sum(grad_rows * output[rows], axis=-1)

        for cols in chunks(n, config.block_size):
            delta_q, (t_q, t_k, t_v) = supplier.encodings(rows, cols)
            weights = np.exp(supplier.tile(rows, cols, t_q, t_k) - row_max[..., None])
            weights /= row_sum[..., None]
            values = supplier.v[cols][None, :, :, :] + t_v
            d_weights = np.einsum("rhx,rchx->rhc", grad_rows, values)
            d_scores = weights * (d_weights - row_dot[..., None]) * scale

            d_q[rows] += np.einsum("rhc,chx->rhx", d_scores, k[cols])
            d_q[rows] += np.einsum("rhc,rchx->rhx", d_scores, t_k)
            d_k[cols] += np.einsum("rhc,rhx->chx", d_scores, q[rows])
            d_k[cols] += np.einsum("rhc,rchx->chx", d_scores, t_q)
            d_v[cols] += np.einsum("rhc,rhx->chx", weights, grad_rows)

            tile_shape = (len(rows), len(cols), config.d)
            role_grads = {
                Role.Q: np.einsum("rhc,chx->rchx", d_scores, k[cols]),
                Role.K: np.einsum("rhc,rhx->rchx", d_scores, q[rows]),
                Role.V: np.einsum("rhc,rhx->rchx", weights, grad_rows),
            }
            for role, grad in role_grads.items():
                accumulate_gradients(
                    table_grads,
                    delta_q,
                    tables,
                    role,
                    grad.reshape(tile_shape),
                    domain,
                )

        if prompts.shape[0]:
            prompt_scores = supplier.prompt_tile(rows, prompt_keys)
            weights = np.exp(prompt_scores - row_max[..., None]) / row_sum[..., None]
            d_weights = np.einsum("rhx,bhx->rhb", grad_rows, prompt_values)
            d_scores = weights * (d_weights - row_dot[..., None]) * scale
            d_q[rows] += np.einsum("rhb,bhx->rhx", d_scores, prompt_keys)
            d_prompt_keys += np.einsum("rhb,rhx->bhx", d_scores, q[rows])
            d_prompt_values += np.einsum("rhb,rhx->bhx", weights, grad_rows)

    d_q = d_q.reshape(n, config.d)
    d_k = d_k.reshape(n, config.d)
    d_v = d_v.reshape(n, config.d)
    d_prompt_keys = d_prompt_keys.reshape(-1, config.d)
    d_prompt_values = d_prompt_values.reshape(-1, config.d)
    f = window.features
    return AttentionGradients(
        features=d_q @ proj.q.T + d_k @ proj.k.T + d_v @ proj.v.T,
        q=f.T @ d_q,
        k=f.T @ d_k + prompts.T @ d_prompt_keys,
        v=f.T @ d_v + prompts.T @ d_prompt_values,
        prompts=d_prompt_keys @ proj.k.T + d_prompt_values @ proj.v.T,
        tables=table_grads,
    )
