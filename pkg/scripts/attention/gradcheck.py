"""
Central finite-difference verification of the attention gradients.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from crse import ROLES, CrseMode, LookupTableSet, QuantizerSpec, create_tables
from crse import accumulate_gradients, zero_gradients

from .backward import window_attention_backward
from .config import AttentionConfig, AttentionWindow, ProjectionSet
from .forward import window_attention_reference

DEFAULT_STEP = 1e-4
DEFAULT_RTOL = 1e-4
DEFAULT_ATOL = 1e-6


@dataclass(frozen=True, eq=False)
class GradcheckCase:
    window: AttentionWindow
    prompts: np.ndarray
    proj: ProjectionSet
    tables: LookupTableSet
    config: AttentionConfig
    domain: int | None
    upstream: np.ndarray

    def loss(self) -> float:
        output, _ = window_attention_reference(
            self.window, self.prompts, self.proj, self.tables, self.config, self.domain
        )
        return float(np.sum(self.upstream * output))

    def parameters(self) -> dict[str, np.ndarray]:
        """Live arrays keyed like AttentionGradients.named_arrays()."""
        arrays = {
            "features": self.window.features,
            "projections.q": self.proj.q,
            "projections.k": self.proj.k,
            "projections.v": self.proj.v,
            "prompts": self.prompts,
        }
        arrays.update({f"tables.{n}": a for n, a in self.tables.named_arrays().items()})
        return arrays


@dataclass
class GradcheckResult:
    max_error: float = 0.0
    worst_path: str = ""
    checked: int = 0

    def absorb(self, other: "GradcheckResult", prefix: str = "") -> None:
        self.checked += other.checked
        if other.max_error > self.max_error or not self.worst_path:
            self.max_error = other.max_error
            self.worst_path = prefix + other.worst_path


@dataclass
class GradcheckReport:
    seed: int
    trials: int
    tolerance: float
    per_mode: dict[str, GradcheckResult] = field(default_factory=dict)

    @property
    def worst(self) -> GradcheckResult:
        result = GradcheckResult()
        for mode, mode_result in self.per_mode.items():
            result.absorb(mode_result, f"{mode}/")
        return result

    @property
    def passed(self) -> bool:
        return self.worst.max_error < self.tolerance


def random_case(
    rng: np.random.Generator,
    mode: CrseMode | str,
    voxels: int | None = None,
    prompt_count: int = 5,
    d: int = 4,
    heads: int = 2,
    domains: int = 2,
    divisions: tuple[int, int] = (4, 4),
) -> GradcheckCase:
    """Small random window with non-trivial parameters of every kind."""
    mode = CrseMode(mode)
    n = int(rng.integers(1, 9)) if voxels is None else voxels
    config = AttentionConfig(
        d=d, heads=heads, window_size=3, prompt_count=prompt_count, crse_mode=mode
    )
    quantizer = QuantizerSpec.for_window(3, 0.1, 9, *divisions)

    normals = rng.normal(size=(n, 3))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    signals = np.hstack(
        [rng.uniform(0.0, 0.3, (n, 3)), rng.uniform(0, 1, (n, 3)), normals]
    )
    window = AttentionWindow(rng.normal(size=(n, d)), signals, quantizer)

    tables = create_tables(mode, d, 9, domains, *divisions)
    arrays = {
        name: rng.normal(0.0, 0.5, a.shape)
        for name, a in tables.shared_arrays().items()
    }
    arrays.update(
        {
            name: rng.uniform(0.5, 1.5, a.shape)
            for name, a in tables.modulation_arrays().items()
        }
    )
    tables = replace(tables, **arrays)

    proj = ProjectionSet(*(rng.normal(0.0, 0.5, (d, d)) for _ in range(3)))
    prompts = rng.normal(size=(prompt_count, d))
    domain = int(rng.integers(domains)) if mode.is_modulated else None
    upstream = rng.normal(size=(n, d))
    return GradcheckCase(window, prompts, proj, tables, config, domain, upstream)


def touched_entries(case: GradcheckCase) -> dict[str, np.ndarray]:
    """Boolean mask per table array of the entries some delta indexes."""
    arrays = case.tables.named_arrays()
    ones = replace(case.tables, **{n: np.ones_like(a) for n, a in arrays.items()})
    counts = zero_gradients(ones)
    delta_q = case.window.deltas()
    upstream = np.ones((*delta_q.q1.shape[:-1], case.config.d))
    for role in ROLES:
        accumulate_gradients(counts, delta_q, ones, role, upstream, case.domain)
    return {f"tables.{n}": g > 0 for n, g in counts.items()}


def relative_error(analytic: float, numeric: float, rtol: float, atol: float) -> float:
    """|a - n| scaled so that the pass rule |a - n| <= max(atol, rtol*max(|a|,|n|))
    reads error <= rtol."""
    scale = max(abs(analytic), abs(numeric), atol / rtol)
    return abs(analytic - numeric) / scale


def check_gradients(
    case: GradcheckCase,
    step: float = DEFAULT_STEP,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    corrupt: bool = False,
) -> GradcheckResult:
    """Compare analytic gradients with central differences on every input
    entry and every touched table entry."""
    grads = window_attention_backward(
        case.window,
        case.prompts,
        case.proj,
        case.tables,
        case.config,
        case.upstream,
        case.domain,
    ).named_arrays()
    if corrupt:
        grads["features"] = grads["features"].copy()
        grads["features"].flat[0] += 1e-2

    masks = touched_entries(case)
    result = GradcheckResult()
    for path, array in case.parameters().items():
        mask = masks.get(path, np.ones(array.shape, dtype=bool))
        for index in zip(*np.nonzero(mask)):
            original = array[index]
            array[index] = original + step
            upper = case.loss()
            array[index] = original - step
            lower = case.loss()
            array[index] = original
            numeric = (upper - lower) / (2 * step)
            error = relative_error(float(grads[path][index]), numeric, rtol, atol)
            result.checked += 1
            if error > result.max_error or not result.worst_path:
                result.max_error = error
                result.worst_path = f"{path}[{', '.join(str(int(i)) for i in index)}]"
    return result


def run_gradcheck(
    seed: int,
    trials: int = 50,
    tolerance: float = DEFAULT_RTOL,
    modes=tuple(CrseMode),
    corrupt: bool = False,
) -> GradcheckReport:
    """``trials`` random windows per mode, alternating between 0 and 5 prompts."""
    report = GradcheckReport(seed, trials, tolerance)
    rng = np.random.default_rng(seed)
    for mode in modes:
        mode = CrseMode(mode)
        mode_result = GradcheckResult()
        for trial in range(trials):
            case = random_case(rng, mode, prompt_count=5 if trial % 2 else 0)
            result = check_gradients(case, rtol=tolerance, corrupt=corrupt)
            mode_result.absorb(result, f"trial {trial}/")
        report.per_mode[str(mode)] = mode_result
    return report
