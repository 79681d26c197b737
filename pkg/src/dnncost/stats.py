"""Per-layer and per-network storage and compute tallies.

Conventions: one MAC is one multiply-accumulate. Bias words count as stored
weights but contribute neither MACs nor data-movement volume (they are added
once per output, not streamed per MAC), so LayerStats carries both a weight
count and a separate movement volume dw. Pool, act, concat, and add layers
carry zero weights and zero MACs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netmodel import ResolvedLayer, ResolvedNetwork


@dataclass(frozen=True)
class LayerStats:
    """Counts for a single layer at a given batch size.

    di, dw, do are the data-movement volumes in words: the input feature
    map, the multiplicative weights, and the output feature map.
    """

    name: str
    kind: str
    weights: int
    macs: int
    di: int
    dw: int
    do: int


@dataclass(frozen=True)
class NetworkStats:
    """Per-layer rows (conv and fc only) plus subtotals and grand totals."""

    network: str
    batch: int
    layers: tuple[LayerStats, ...]
    conv_layers: int
    conv_weights: int
    conv_macs: int
    fc_layers: int
    fc_weights: int
    fc_macs: int

    @property
    def total_weights(self) -> int:
        return self.conv_weights + self.fc_weights

    @property
    def total_macs(self) -> int:
        return self.conv_macs + self.fc_macs


def wired_pairs(layer: ResolvedLayer) -> int:
    """Number of wired (filter, input-channel) pairs of a weighted layer."""
    if layer.kind == "conv" and layer.connections is not None:
        return layer.connections
    return layer.out_channels * (layer.in_channels // layer.groups)


def layer_stats(layer: ResolvedLayer, batch: int = 1) -> LayerStats:
    """Storage and compute counts for one resolved layer."""
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    di = batch * layer.in_channels * layer.in_height * layer.in_width
    do = batch * layer.out_channels * layer.out_height * layer.out_width
    if layer.kind in ("conv", "fc"):
        r, s = layer.kernel
        dw = wired_pairs(layer) * r * s
        weights = dw + (layer.out_channels if layer.bias else 0)
        macs = batch * dw * layer.out_height * layer.out_width
    else:
        dw = 0
        weights = 0
        macs = 0
    return LayerStats(name=layer.name, kind=layer.kind, weights=weights,
                      macs=macs, di=di, dw=dw, do=do)


def network_stats(net: ResolvedNetwork) -> NetworkStats:
    """Aggregate counts over a resolved network.

    Only conv and fc layers appear in the per-layer list; everything else is
    zero cost and would only pad the report.
    """
    rows = tuple(layer_stats(layer, net.batch) for layer in net.layers
                 if layer.kind in ("conv", "fc"))
    conv = [r for r in rows if r.kind == "conv"]
    fc = [r for r in rows if r.kind == "fc"]
    return NetworkStats(
        network=net.name,
        batch=net.batch,
        layers=rows,
        conv_layers=len(conv),
        conv_weights=sum(r.weights for r in conv),
        conv_macs=sum(r.macs for r in conv),
        fc_layers=len(fc),
        fc_weights=sum(r.weights for r in fc),
        fc_macs=sum(r.macs for r in fc),
    )
