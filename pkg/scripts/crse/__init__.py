"""
Contextual relative signal encoding: quantizer, look-up tables, encoders.
"""

from .encoding import (
    accumulate_gradients,
    crse_base,
    crse_domain_modulated,
    encode,
    vm_crse,
    vm_crse_domain_modulated,
    zero_gradients,
)
from .quantizer import (
    QuantizedDelta,
    QuantizerSpec,
    bin_centers,
    quantize,
    quantize_2d,
    quantize_delta,
)
from .tables import (
    ROLES,
    VM_PAIRS,
    CrseMode,
    LookupTableSet,
    Role,
    create_tables,
    init_tables,
    load_tables,
    modulation_param_count,
    save_tables,
)

__all__ = [
    "ROLES",
    "VM_PAIRS",
    "CrseMode",
    "LookupTableSet",
    "QuantizedDelta",
    "QuantizerSpec",
    "Role",
    "accumulate_gradients",
    "bin_centers",
    "create_tables",
    "crse_base",
    "crse_domain_modulated",
    "encode",
    "init_tables",
    "load_tables",
    "modulation_param_count",
    "quantize",
    "quantize_2d",
    "quantize_delta",
    "save_tables",
    "vm_crse",
    "vm_crse_domain_modulated",
    "zero_gradients",
]
