"""Access-count model for four spatial-accelerator dataflow policies.

The model answers one question per layer: how many times does each data type
(input activations, weights, partial sums) touch each level of the storage
hierarchy (per-PE register file, inter-PE network, global buffer, DRAM)?

Each dataflow is summarized by a small table of reuse factors per data type:

* ``resident``       the type lives in the PE register file, so every MAC
                     touches the RF (twice for partial sums: read + update)
* ``rf_reuse``       MACs served by one RF fill; deliveries from above are
                     T / rf_reuse
* ``multicast``      PEs fed by one buffer read over the network
* ``spatial_accum``  partial sums combined across PEs before a buffer update

Counting rules, with T = total MACs of the layer:

* RF: T per resident read type, 2T for resident partial sums, else 0
* NoC: deliveries = ceil(T / rf_reuse), floored at the unique volume
  (deliveries can never undercut the distinct words consumed)
* buffer: deliveries / multicast for read types, clamped to
  [unique volume, deliveries]; partial-sum updates count read + write, so
  2 * ceil(T / (rf_reuse * spatial_accum)) clamped to [Do, 2T]
* DRAM: the unique volume, fetched or written exactly once (ideal DRAM,
  no capacity-induced refetch)

The four policies:

* ws   weights pinned in RFs; inputs multicast to the filter-sized PE
       groups; partial sums accumulated spatially across each filter plane
* os   each PE owns one output; partial sums never leave the RF until done
* nlr  no per-PE storage at all; everything streams from the global buffer,
       inputs and partial sums ride wide broadcast/adder lanes
* rs   filter rows and input rows pinned per PE; one-dimensional
       convolutions replay from the RF, partial sums accumulated across the
       kernel-row dimension
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .archmodel import ArchConfig
from .netmodel import ResolvedLayer
from .stats import layer_stats

DATA_TYPES = ("input", "weight", "psum")
LEVELS = ("rf", "noc", "buf", "dram")

COUNT_LIMIT = 2**63 - 1


class DataflowKind(str, Enum):
    WS = "ws"
    OS = "os"
    NLR = "nlr"
    RS = "rs"


@dataclass(frozen=True)
class TypeReuse:
    resident: bool
    rf_reuse: int = 1
    multicast: int = 1
    spatial_accum: int = 1


@dataclass(frozen=True)
class ReuseFactors:
    kind: DataflowKind
    input: TypeReuse
    weight: TypeReuse
    psum: TypeReuse

    def of(self, dtype: str) -> TypeReuse:
        return getattr(self, dtype)


@dataclass(frozen=True)
class AccessCounts:
    """Access counts per data type and hierarchy level for one layer."""

    layer: str
    kind: DataflowKind
    total_macs: int
    acc: dict[str, dict[str, int]]


def _ceildiv(a: int, b: int) -> int:
    return -(-a // b)


def _weighted(layer: ResolvedLayer):
    if layer.kind not in ("conv", "fc"):
        raise ValueError(
            f"layer {layer.name!r}: access counts are defined for conv and fc "
            f"layers only, not {layer.kind!r}")


def reuse_factors(kind: DataflowKind, layer: ResolvedLayer, arch: ArchConfig,
                  batch: int = 1) -> ReuseFactors:
    """Reuse factor table for one layer under one dataflow.

    Degenerate shapes clamp every factor to at least 1.
    """
    _weighted(layer)
    kind = DataflowKind(kind)
    r, s = layer.kernel
    e, f = layer.out_height, layer.out_width
    m = layer.out_channels
    p = arch.pe_count
    st = layer_stats(layer, 1)
    # MACs per output word; equals (C/G)*R*S on densely wired layers
    depth = max(1, _ceildiv(st.macs, st.do))

    if kind is DataflowKind.WS:
        # one weight per PE; a filter occupies an R*S block of the array
        mp = min(max(p // (r * s), 1), m)
        return ReuseFactors(
            kind=kind,
            weight=TypeReuse(resident=True, rf_reuse=max(1, batch * e * f)),
            input=TypeReuse(resident=False, multicast=mp),
            psum=TypeReuse(resident=False, spatial_accum=r * s),
        )
    if kind is DataflowKind.OS:
        q = max(1, min(p, e * f))
        return ReuseFactors(
            kind=kind,
            psum=TypeReuse(resident=True, rf_reuse=depth),
            input=TypeReuse(resident=False, multicast=min(r * s, q)),
            weight=TypeReuse(resident=False, multicast=q),
        )
    if kind is DataflowKind.NLR:
        lane = arch.nlr_lane_width
        return ReuseFactors(
            kind=kind,
            input=TypeReuse(resident=False, multicast=min(m, lane)),
            weight=TypeReuse(resident=False, multicast=1),
            psum=TypeReuse(resident=False, spatial_accum=min(depth, lane)),
        )
    # RS: filter row and input row pinned per PE, sliding window along a row
    g = max(1, min(arch.rs_channels_per_pe, layer.in_channels))
    return ReuseFactors(
        kind=kind,
        weight=TypeReuse(resident=True, rf_reuse=max(1, f), multicast=min(e, p)),
        input=TypeReuse(resident=True, rf_reuse=max(1, s), multicast=min(r, p)),
        psum=TypeReuse(resident=True, rf_reuse=max(1, s * g), spatial_accum=max(1, r)),
    )


def _clamp(x: int, lo: int, hi: int) -> int:
    return max(lo, min(x, hi))


def access_counts(factors: ReuseFactors, layer: ResolvedLayer,
                  batch: int = 1) -> AccessCounts:
    """Evaluate the counting rules for one layer under one factor table."""
    _weighted(layer)
    st = layer_stats(layer, batch)
    t = st.macs
    unique = {"input": st.di, "weight": st.dw, "psum": st.do}

    acc: dict[str, dict[str, int]] = {}
    for dtype in ("input", "weight"):
        fac = factors.of(dtype)
        deliveries = max(_ceildiv(t, fac.rf_reuse), unique[dtype])
        acc[dtype] = {
            "rf": t if fac.resident else 0,
            "noc": deliveries,
            "buf": _clamp(_ceildiv(deliveries, fac.multicast), unique[dtype], deliveries),
            "dram": unique[dtype],
        }

    fac = factors.psum
    updates = _ceildiv(t, fac.rf_reuse * fac.spatial_accum)
    acc["psum"] = {
        "rf": 2 * t if fac.resident else 0,
        "noc": max(_ceildiv(t, fac.rf_reuse), st.do),
        "buf": _clamp(2 * updates, st.do, 2 * t),
        "dram": st.do,  # output writes only
    }

    worst = max(max(row.values()) for row in acc.values())
    if worst > COUNT_LIMIT or t > COUNT_LIMIT:
        raise OverflowError(
            f"layer {layer.name!r}: access count {worst} exceeds the 2**63 - 1 budget")
    return AccessCounts(layer=layer.name, kind=factors.kind, total_macs=t, acc=acc)


def layer_access_counts(kind: DataflowKind, layer: ResolvedLayer,
                        arch: ArchConfig, batch: int = 1) -> AccessCounts:
    """Convenience: factor table and counting rules in one step."""
    return access_counts(reuse_factors(kind, layer, arch, batch), layer, batch)
