"""Energy model over access counts, with bitwidth and sparsity modifiers.

Movement energy per data type and level is the access count times the level
cost, scaled by the type's bitwidth relative to the native word. Partial sums
always move at full word width. Compute energy scales quadratically with the
two operand bitwidths and linearly with the product of the operand densities
(a zero operand gates the MAC); sparsity does not modify movement here, which
keeps the movement side a strict upper bound for compressed traffic.

Reports are in relative units (register-file access = 1). The ``scale`` field
is a free calibration factor for users who know their per-access picojoules;
it multiplies nothing internally and simply travels with the report.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .archmodel import ArchConfig
from .dataflow import (DATA_TYPES, LEVELS, AccessCounts, DataflowKind,
                       layer_access_counts)
from .netmodel import ResolvedNetwork


@dataclass(frozen=True)
class Modifiers:
    """Workload knobs: operand densities in (0, 1] and operand bitwidths.

    ``None`` bitwidths mean the architecture's native word.
    """

    density_in: float = 1.0
    density_w: float = 1.0
    bits_in: int | None = None
    bits_w: int | None = None

    def __post_init__(self):
        for label, rho in (("density_in", self.density_in), ("density_w", self.density_w)):
            if not 0.0 < rho <= 1.0:
                raise ValueError(f"{label} must be in (0, 1], got {rho}")
        for label, bits in (("bits_in", self.bits_in), ("bits_w", self.bits_w)):
            if bits is not None and bits < 1:
                raise ValueError(f"{label} must be >= 1, got {bits}")


def _resolve_bits(mods: Modifiers, arch: ArchConfig) -> tuple[int, int]:
    bi = arch.word_bits if mods.bits_in is None else mods.bits_in
    bw = arch.word_bits if mods.bits_w is None else mods.bits_w
    for label, bits in (("bits_in", bi), ("bits_w", bw)):
        if not 1 <= bits <= arch.word_bits:
            raise ValueError(f"{label} must be in [1, {arch.word_bits}], got {bits}")
    return bi, bw


@dataclass(frozen=True)
class EnergyReport:
    """Energy for one layer (or an aggregate) under one dataflow.

    ``movement[dtype][level]`` is the movement energy matrix; totals and both
    breakdown axes are derived, so they cannot drift out of sync with it.
    """

    layer: str
    dataflow: str
    movement: dict[str, dict[str, float]]
    compute: float
    total_macs: int
    scale: float = 1.0

    @property
    def by_type(self) -> dict[str, float]:
        return {d: sum(self.movement[d][lv] for lv in LEVELS) for d in DATA_TYPES}

    @property
    def by_level(self) -> dict[str, float]:
        return {lv: sum(self.movement[d][lv] for d in DATA_TYPES) for lv in LEVELS}

    @property
    def movement_total(self) -> float:
        return sum(self.by_type.values())

    @property
    def total(self) -> float:
        return self.movement_total + self.compute


def layer_energy(counts: AccessCounts, arch: ArchConfig,
                 mods: Modifiers = Modifiers()) -> EnergyReport:
    """Price one layer's access counts."""
    bi, bw = _resolve_bits(mods, arch)
    width = {"input": bi, "weight": bw, "psum": arch.word_bits}
    movement = {
        dtype: {
            level: counts.acc[dtype][level] * arch.energy.cost(level)
                   * width[dtype] / arch.word_bits
            for level in LEVELS
        }
        for dtype in DATA_TYPES
    }
    compute = (counts.total_macs * arch.mac_energy
               * (bi * bw) / (arch.word_bits * arch.word_bits)
               * mods.density_in * mods.density_w)
    return EnergyReport(layer=counts.layer, dataflow=DataflowKind(counts.kind).value,
                        movement=movement, compute=compute,
                        total_macs=counts.total_macs)


def _aggregate(reports: list[EnergyReport], label: str, kind: str) -> EnergyReport:
    movement = {d: {lv: sum(r.movement[d][lv] for r in reports) for lv in LEVELS}
                for d in DATA_TYPES}
    return EnergyReport(layer=label, dataflow=kind, movement=movement,
                        compute=sum(r.compute for r in reports),
                        total_macs=sum(r.total_macs for r in reports))


def network_energy(net: ResolvedNetwork, kind: DataflowKind, arch: ArchConfig,
                   mods: Modifiers = Modifiers()) -> tuple[list[EnergyReport], EnergyReport]:
    """Per-layer reports over the weighted layers, plus their aggregate."""
    kind = DataflowKind(kind)
    reports = [
        layer_energy(layer_access_counts(kind, layer, arch, net.batch), arch, mods)
        for layer in net.layers if layer.kind in ("conv", "fc")
    ]
    return reports, _aggregate(reports, "total", kind.value)


@dataclass(frozen=True)
class DataflowComparison:
    kind: str
    total: float
    conv_total: float
    ratio: float
    conv_ratio: float
    by_type: dict[str, float]
    by_level: dict[str, float]
    compute: float
    layer_totals: dict[str, float]


@dataclass(frozen=True)
class ComparisonReport:
    network: str
    batch: int
    entries: tuple[DataflowComparison, ...]
    winner: str
    conv_winner: str


def compare_dataflows(net: ResolvedNetwork, arch: ArchConfig,
                      mods: Modifiers = Modifiers()) -> ComparisonReport:
    """Aggregate energy per dataflow, normalized to the cheapest one."""
    kinds = {layer.name: layer.kind for layer in net.layers}
    raw = []
    for kind in DataflowKind:
        reports, agg = network_energy(net, kind, arch, mods)
        conv_total = sum(r.total for r in reports if kinds[r.layer] == "conv")
        layer_totals = {r.layer: r.total for r in reports}
        raw.append((kind.value, agg, conv_total, layer_totals))

    best = min(agg.total for _, agg, _, _ in raw)
    conv_best = min(ct for _, _, ct, _ in raw)
    entries = tuple(
        DataflowComparison(
            kind=kind,
            total=agg.total,
            conv_total=conv_total,
            ratio=agg.total / best,
            conv_ratio=conv_total / conv_best if conv_best else 1.0,
            by_type=agg.by_type,
            by_level=agg.by_level,
            compute=agg.compute,
            layer_totals=layer_totals,
        )
        for kind, agg, conv_total, layer_totals in raw
    )
    winner = min(entries, key=lambda en: en.total).kind
    conv_winner = min(entries, key=lambda en: en.conv_total).kind
    return ComparisonReport(network=net.name, batch=net.batch, entries=entries,
                            winner=winner, conv_winner=conv_winner)
