"""
Tile-wise attention scores with contextual relative signal bias.
"""

from dataclasses import dataclass

import numpy as np

from crse import LookupTableSet, Role, encode
from errors import ModeError, NumericsError, ShapeError

from .config import AttentionConfig, AttentionWindow, ProjectionSet


def _heads(x: np.ndarray, config: AttentionConfig) -> np.ndarray:
    return x.reshape(*x.shape[:-1], config.heads, config.head_dim)


@dataclass(frozen=True, eq=False)
class ScoreSupplier:
    """Projected window features plus the tables needed to score any tile.

    Projections are held per head as (N, H, d/H). Nothing of size N x N is
    kept; callers ask for (rows x cols) tiles.
    """

    window: AttentionWindow
    config: AttentionConfig
    tables: LookupTableSet
    domain: int | None
    q: np.ndarray
    k: np.ndarray
    v: np.ndarray

    def encodings(self, rows, cols, roles=(Role.Q, Role.K, Role.V)):
        """(r, c, H, d/H) encodings of the tile deltas, one per role, plus the
        quantized deltas themselves."""
        delta_q = self.window.delta_tile(rows, cols)
        encoded = [
            _heads(encode(delta_q, self.tables, role, self.domain), self.config)
            for role in roles
        ]
        return delta_q, encoded

    def tile(self, rows, cols, t_q=None, t_k=None) -> np.ndarray:
        """Scores e_ij per head, shape (r, H, c)."""
        if t_q is None or t_k is None:
            _, (t_q, t_k) = self.encodings(rows, cols, (Role.Q, Role.K))
        q = self.q[rows]
        k = self.k[cols]
        scores = np.einsum("rhx,rchx->rhc", q, k[None, :, :, :] + t_k)
        scores += np.einsum("chx,rchx->rhc", k, t_q)
        scores *= self.config.scale
        if not np.all(np.isfinite(scores)):
            raise NumericsError("non-finite attention score")
        return scores

    def row(self, i: int) -> np.ndarray:
        """(H, N) scores of query i against every voxel of the window."""
        return self.tile(np.array([i]), np.arange(len(self.window)))[0]

    def prompt_tile(self, rows, prompt_keys: np.ndarray) -> np.ndarray:
        """Scores against projected prompt keys (B, H, d/H), shape (r, H, B).

        Prompts carry no relative signal encoding.
        """
        scores = np.einsum("rhx,bhx->rhb", self.q[rows], prompt_keys)
        scores *= self.config.scale
        if not np.all(np.isfinite(scores)):
            raise NumericsError("non-finite prompt score")
        return scores


def check_inputs(
    window: AttentionWindow,
    tables: LookupTableSet,
    config: AttentionConfig,
    domain: int | None,
    prompts: np.ndarray | None = None,
) -> None:
    features = window.features
    if features.shape[1] != config.d or tables.d != config.d:
        raise ShapeError(
            f"features ({features.shape[1]}) and tables ({tables.d}) must have "
            f"d={config.d} channels"
        )
    if tables.mode is not config.crse_mode:
        raise ModeError(
            f"tables are in {tables.mode} mode, block expects {config.crse_mode}"
        )
    tables.check_domain(domain)
    if prompts is not None and np.shape(prompts) != (config.prompt_count, config.d):
        raise ShapeError(
            f"expected {config.prompt_count} prompts of width {config.d}, "
            f"got {np.shape(prompts)}"
        )


def attention_scores(
    window: AttentionWindow,
    proj: ProjectionSet,
    tables: LookupTableSet,
    config: AttentionConfig,
    domain: int | None = None,
) -> ScoreSupplier:
    check_inputs(window, tables, config, domain)
    features = window.features
    return ScoreSupplier(
        window,
        config,
        tables,
        domain,
        _heads(features @ proj.q, config),
        _heads(features @ proj.k, config),
        _heads(features @ proj.v, config),
    )


def project_prompts(prompts: np.ndarray, proj: ProjectionSet, config: AttentionConfig):
    """Prompt keys and values per head, each (B, H, d/H)."""
    prompts = np.asarray(prompts, dtype=np.float64).reshape(-1, config.d)
    return _heads(prompts @ proj.k, config), _heads(prompts @ proj.v, config)


def chunks(count: int, size: int):
    for start in range(0, count, size):
        yield np.arange(start, min(start + size, count))
