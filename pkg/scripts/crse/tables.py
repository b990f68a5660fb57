"""
Look-up table storage for the four contextual relative signal encodings.
"""

import struct
from dataclasses import dataclass, replace
from enum import IntEnum, StrEnum
from pathlib import Path

import numpy as np

from errors import ConfigError, DomainError, ParseError, ShapeError

SHARED_INIT_VARIANCE = 0.02
SIGNAL_GROUP_SIZE = 3


class CrseMode(StrEnum):
    BASE = "base"
    DOMAIN_MODULATED = "domain-modulated"
    VM = "vm"
    VM_DOMAIN_MODULATED = "vm-domain-modulated"

    @property
    def is_vm(self) -> bool:
        return self in (CrseMode.VM, CrseMode.VM_DOMAIN_MODULATED)

    @property
    def is_modulated(self) -> bool:
        return self in (CrseMode.DOMAIN_MODULATED, CrseMode.VM_DOMAIN_MODULATED)


class Role(IntEnum):
    Q = 0
    K = 1
    V = 2


ROLES = (Role.Q, Role.K, Role.V)

# 2D partner components of 1D factor k inside a group: (k+1, k+2) mod 3
VM_PAIRS = ((1, 2), (2, 0), (0, 1))


@dataclass(frozen=True, eq=False)
class LookupTableSet:
    """Shared tables and per-domain modulation scalars of one block.

    Layouts (role axis first, Q, K, V):
      shared             (3, M, T, d)            base, domain-modulated
      modulation         (3, L, M, T)            domain-modulated
      vectors            (3, G, 3, T, d)         vm, vm-domain-modulated
      matrices           (3, G, 3, T2, T2, d)    vm, vm-domain-modulated
      vector_modulation  (3, L, G, 3, T)         vm-domain-modulated
      matrix_modulation  (3, L, G, 3, T2, T2)    vm-domain-modulated
    with G = M / 3 signal groups. Matrix k of a group is indexed by the
    components VM_PAIRS[k].
    """

    mode: CrseMode
    d: int
    signal_count: int
    domains: int
    divisions_1d: int
    divisions_2d: int
    shared: np.ndarray | None = None
    modulation: np.ndarray | None = None
    vectors: np.ndarray | None = None
    matrices: np.ndarray | None = None
    vector_modulation: np.ndarray | None = None
    matrix_modulation: np.ndarray | None = None

    @property
    def groups(self) -> int:
        return self.signal_count // SIGNAL_GROUP_SIZE

    def named_arrays(self) -> dict[str, np.ndarray]:
        names = (
            "shared",
            "modulation",
            "vectors",
            "matrices",
            "vector_modulation",
            "matrix_modulation",
        )
        return {n: getattr(self, n) for n in names if getattr(self, n) is not None}

    def shared_arrays(self) -> dict[str, np.ndarray]:
        return {
            n: a for n, a in self.named_arrays().items() if not n.endswith("modulation")
        }

    def modulation_arrays(self) -> dict[str, np.ndarray]:
        return {
            n: a for n, a in self.named_arrays().items() if n.endswith("modulation")
        }

    def shared_parameter_count(self) -> int:
        return sum(a.size for a in self.shared_arrays().values())

    def modulation_parameter_count(self) -> int:
        return sum(a.size for a in self.modulation_arrays().values())

    def check_domain(self, domain: int | None) -> None:
        if self.mode.is_modulated and (
            domain is None or not 0 <= int(domain) < self.domains
        ):
            raise DomainError(
                f"domain {domain} outside registered range [0, {self.domains})"
            )

    def copy(self) -> "LookupTableSet":
        return replace(self, **{n: a.copy() for n, a in self.named_arrays().items()})


def create_tables(
    mode: CrseMode | str,
    d: int,
    signal_count: int = 9,
    domains: int = 1,
    divisions_1d: int = 16,
    divisions_2d: int = 4,
) -> LookupTableSet:
    """Zero shared tables and unit modulation scalars for the given mode."""
    mode = CrseMode(mode)
    if d < 1 or signal_count < 1 or domains < 1:
        raise ConfigError("d, signal_count and domains must be positive")
    if divisions_1d < 2 or divisions_2d < 2:
        raise ConfigError("division counts must be at least 2")
    m, t, t2, L = signal_count, divisions_1d, divisions_2d, domains
    arrays = {}
    if mode.is_vm:
        if m % SIGNAL_GROUP_SIZE:
            raise ShapeError("VM encodings need signal components in groups of 3")
        g = m // SIGNAL_GROUP_SIZE
        arrays["vectors"] = np.zeros((3, g, 3, t, d))
        arrays["matrices"] = np.zeros((3, g, 3, t2, t2, d))
        if mode.is_modulated:
            arrays["vector_modulation"] = np.ones((3, L, g, 3, t))
            arrays["matrix_modulation"] = np.ones((3, L, g, 3, t2, t2))
    else:
        arrays["shared"] = np.zeros((3, m, t, d))
        if mode.is_modulated:
            arrays["modulation"] = np.ones((3, L, m, t))
    return LookupTableSet(mode, d, m, L, t, t2, **arrays)


def init_tables(tables: LookupTableSet, seed: int) -> LookupTableSet:
    """Shared entries ~ Normal(0, variance 0.02); modulation scalars set to 1."""
    rng = np.random.default_rng(seed)
    std = np.sqrt(SHARED_INIT_VARIANCE)
    arrays = {
        name: rng.normal(0.0, std, size=array.shape)
        for name, array in tables.shared_arrays().items()
    }
    arrays.update(
        {name: np.ones_like(a) for name, a in tables.modulation_arrays().items()}
    )
    return replace(tables, **arrays)


def modulation_param_count(
    M: int, L: int, T: int, mode: CrseMode | str, T2: int = 4
) -> int:
    """Domain-modulation scalars per block.

    domain-modulated: 3 * M * L * T.
    vm-domain-modulated: 3 * L * (M / 3) * (3 * T + 3 * T2**2).
    Unmodulated modes have none.
    """
    mode = CrseMode(mode)
    if mode is CrseMode.DOMAIN_MODULATED:
        return 3 * M * L * T
    if mode is CrseMode.VM_DOMAIN_MODULATED:
        return 3 * L * (M // SIGNAL_GROUP_SIZE) * (3 * T + 3 * T2 * T2)
    return 0


_MAGIC = b"CRSE"
_FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHBIIIII")
_MODE_CODES = {mode: code for code, mode in enumerate(CrseMode)}


def _blocks(tables: LookupTableSet) -> list[np.ndarray]:
    """Arrays in serialization order: shared factors per role, then
    modulation per role (domain-major inside)."""
    shared = [a for a in tables.shared_arrays().values()]
    modulation = [a for a in tables.modulation_arrays().values()]
    blocks = [array[role] for role in ROLES for array in shared]
    blocks += [array[role] for role in ROLES for array in modulation]
    return blocks


def save_tables(tables: LookupTableSet, path: str | Path) -> Path:
    path = Path(path)
    header = _HEADER.pack(
        _MAGIC,
        _FORMAT_VERSION,
        _MODE_CODES[tables.mode],
        tables.d,
        tables.divisions_1d,
        tables.divisions_2d,
        tables.domains,
        tables.signal_count,
    )
    with open(path, "wb") as stream:
        stream.write(header)
        for block in _blocks(tables):
            stream.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
    return path


def load_tables(path: str | Path) -> LookupTableSet:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ParseError("table file shorter than its header")
    magic, version, mode_code, d, t, t2, L, m = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ParseError("not a look-up table file")
    if version != _FORMAT_VERSION:
        raise ParseError(f"unsupported table format version {version}")
    if mode_code >= len(CrseMode):
        raise ParseError(f"unknown mode code {mode_code}")

    tables = create_tables(list(CrseMode)[mode_code], d, m, L, t, t2)
    if (len(data) - _HEADER.size) % 8:
        raise ParseError("table payload is not a whole number of doubles")
    payload = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    blocks = _blocks(tables)
    if payload.size != sum(b.size for b in blocks):
        raise ParseError("table payload length disagrees with header")
    cursor = 0
    for block in blocks:
        block[...] = payload[cursor : cursor + block.size].reshape(block.shape)
        cursor += block.size
    return tables
