"""
Windowed multi-head self-attention with relative signal bias and voxel prompts.
"""

from .backward import AttentionGradients, window_attention_backward
from .config import (
    PARAMETER_INIT_STD,
    AttentionConfig,
    AttentionWindow,
    ProjectionSet,
    PromptBank,
)
from .forward import (
    prompt_attention_mass,
    softmax_statistics,
    window_attention_forward,
    window_attention_reference,
)
from .gradcheck import (
    GradcheckCase,
    GradcheckReport,
    GradcheckResult,
    check_gradients,
    random_case,
    run_gradcheck,
    touched_entries,
)
from .scores import ScoreSupplier, attention_scores

__all__ = [
    "PARAMETER_INIT_STD",
    "AttentionConfig",
    "AttentionGradients",
    "AttentionWindow",
    "GradcheckCase",
    "GradcheckReport",
    "GradcheckResult",
    "ProjectionSet",
    "PromptBank",
    "ScoreSupplier",
    "attention_scores",
    "check_gradients",
    "prompt_attention_mass",
    "random_case",
    "run_gradcheck",
    "softmax_statistics",
    "touched_entries",
    "window_attention_backward",
    "window_attention_forward",
    "window_attention_reference",
]
