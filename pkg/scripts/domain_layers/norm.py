"""
Domain-specific layer normalization.
"""

from dataclasses import dataclass

import numpy as np

from errors import DomainError, ShapeError

DEFAULT_EPS = 1e-5


@dataclass(frozen=True, eq=False)
class DSLNParams:
    """One (gamma, beta) pair per registered domain, arrays of shape (L, d)."""

    gamma: np.ndarray
    beta: np.ndarray
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if np.shape(self.gamma) != np.shape(self.beta) or np.ndim(self.gamma) != 2:
            raise ShapeError("gamma and beta must both be (domains, channels)")

    @property
    def domains(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def initialize(cls, domains: int, d: int, eps: float = DEFAULT_EPS) -> "DSLNParams":
        return cls(np.ones((domains, d)), np.zeros((domains, d)), eps)

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {"gamma": self.gamma, "beta": self.beta}


def standardize(features: np.ndarray, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Per-voxel (f - mean) / sqrt(var + eps) over the channel axis."""
    features = np.asarray(features, dtype=np.float64)
    centered = features - features.mean(axis=-1, keepdims=True)
    # constant rows standardize to exactly zero
    centered[np.all(features == features[..., :1], axis=-1)] = 0.0
    variance = np.mean(centered * centered, axis=-1, keepdims=True)
    return centered / np.sqrt(variance + eps)


def dsln(features: np.ndarray, domain: int, params: DSLNParams) -> np.ndarray:
    """Standardize each voxel over its channels, then apply the domain's affine.

    Raises:
        DomainError: If the domain is not registered
    """
    if not 0 <= int(domain) < params.domains:
        raise DomainError(
            f"domain {domain} outside registered range [0, {params.domains})"
        )
    features = np.asarray(features, dtype=np.float64)
    if features.shape[-1] != params.gamma.shape[1]:
        raise ShapeError(
            f"features have {features.shape[-1]} channels, "
            f"normalization expects {params.gamma.shape[1]}"
        )
    domain = int(domain)
    standardized = standardize(features, params.eps)
    return standardized * params.gamma[domain] + params.beta[domain]
