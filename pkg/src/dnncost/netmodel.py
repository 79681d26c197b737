"""Network descriptions and shape resolution.

A network is a flat, ordered list of layers over a single N x C x H x W input.
Each layer consumes the output of the previous layer unless it names another
earlier layer via ``input`` (or, for the merge pseudo-layers ``concat`` and
``add``, a list of earlier layers via ``inputs``). Named feeds are enough to
express branch-and-merge topologies such as inception modules and residual
shortcuts while keeping the description a flat list; arbitrary graphs are out
of scope.

Layer kinds:

* ``conv``   weighted, strided, padded, optionally grouped 2-D convolution
* ``fc``     fully connected; modeled as a conv whose kernel equals its input
* ``pool``   spatial downsampling, no weights
* ``act``    elementwise nonlinearity, no weights, shape preserving
* ``concat`` channel concatenation of several feeds (zero cost)
* ``add``    elementwise sum of identically shaped feeds (zero cost)

All types are immutable after construction and every function is pure, so the
module is safe for concurrent use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

LAYER_KINDS = ("conv", "fc", "pool", "act", "concat", "add")

# pseudo- and auxiliary layers that carry no weights and no MACs
ZERO_COST_KINDS = ("pool", "act", "concat", "add")


class NetworkError(ValueError):
    """Base class for every network-description failure."""


class NetworkSyntaxError(NetworkError):
    """The document is not well-formed (bad JSON, wrong container types)."""


class NetworkSemanticError(NetworkError):
    """A well-formed document carries an invalid field; names the layer."""


class ShapeError(NetworkError):
    """Shape propagation failed (output underflow, bad channel split)."""


@dataclass(frozen=True)
class LayerSpec:
    """One layer as declared, before shape resolution.

    ``connections`` overrides the number of wired (filter, input-channel)
    pairs of a conv layer; ``None`` means dense wiring, M * C / groups pairs.
    ``inputs`` holds explicit feed names; empty means "previous layer".
    """

    kind: str
    name: str
    out_channels: int = 0
    kernel: tuple[int, int] = (1, 1)
    stride: int = 1
    pad: int = 0
    groups: int = 1
    bias: bool = True
    connections: int | None = None
    inputs: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise NetworkSemanticError(f"layer {self.name!r}: unknown kind {self.kind!r}")
        if not self.name:
            raise NetworkSemanticError("layer with empty name")
        r, s = self.kernel
        if r < 1 or s < 1:
            raise NetworkSemanticError(f"layer {self.name!r}: kernel must be positive, got {self.kernel}")
        if self.stride < 1:
            raise NetworkSemanticError(f"layer {self.name!r}: stride must be >= 1, got {self.stride}")
        if self.pad < 0:
            raise NetworkSemanticError(f"layer {self.name!r}: pad must be >= 0, got {self.pad}")
        if self.groups < 1:
            raise NetworkSemanticError(f"layer {self.name!r}: groups must be >= 1, got {self.groups}")
        if self.kind in ("conv", "fc") and self.out_channels < 1:
            raise NetworkSemanticError(f"layer {self.name!r}: out_channels must be >= 1")
        if self.connections is not None:
            if self.kind != "conv":
                raise NetworkSemanticError(f"layer {self.name!r}: connections only applies to conv layers")
            if self.connections < 1:
                raise NetworkSemanticError(f"layer {self.name!r}: connections must be >= 1")


@dataclass(frozen=True)
class NetworkSpec:
    """A parsed network description."""

    name: str
    in_channels: int
    in_height: int
    in_width: int
    layers: tuple[LayerSpec, ...]


@dataclass(frozen=True)
class ResolvedLayer:
    """A layer with its input and output shapes pinned down.

    For fc layers the kernel is set to the full input extent (R = H, S = W)
    and the output is 1 x 1, so downstream arithmetic treats conv and fc
    uniformly. Pool/act/concat/add keep kernel fields only where meaningful.
    """

    kind: str
    name: str
    in_channels: int
    in_height: int
    in_width: int
    out_channels: int
    out_height: int
    out_width: int
    kernel: tuple[int, int]
    stride: int
    pad: int
    groups: int
    bias: bool
    connections: int | None
    inputs: tuple[str, ...]


@dataclass(frozen=True)
class ResolvedNetwork:
    name: str
    batch: int
    in_channels: int
    in_height: int
    in_width: int
    layers: tuple[ResolvedLayer, ...]


# required and allowed JSON keys per layer kind
_REQUIRED = {
    "conv": {"out_channels", "kernel"},
    "fc": {"out_channels"},
    "pool": {"kernel"},
    "act": set(),
    "concat": {"inputs"},
    "add": {"inputs"},
}
_ALLOWED = {
    "conv": {"type", "name", "input", "out_channels", "kernel", "stride", "pad",
             "groups", "bias", "connections"},
    "fc": {"type", "name", "input", "out_channels", "bias"},
    "pool": {"type", "name", "input", "kernel", "stride", "pad"},
    "act": {"type", "name", "input"},
    "concat": {"type", "name", "inputs"},
    "add": {"type", "name", "inputs"},
}


def _require_int(value, what, minimum):
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise NetworkSemanticError(f"{what} must be an integer >= {minimum}, got {value!r}")
    return value


def _parse_layer(doc, index, seen):
    where = f"layer {index}"
    if not isinstance(doc, dict):
        raise NetworkSyntaxError(f"{where}: expected an object, got {type(doc).__name__}")
    kind = doc.get("type")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise NetworkSemanticError(f"{where}: missing or empty name")
    where = f"{where} ({name!r})"
    if kind not in LAYER_KINDS:
        raise NetworkSemanticError(f"{where}: unknown layer type {kind!r}")
    if name in seen:
        raise NetworkSemanticError(f"{where}: duplicate layer name")

    unknown = set(doc) - _ALLOWED[kind]
    if unknown:
        raise NetworkSemanticError(f"{where}: unknown keys {sorted(unknown)}")
    missing = _REQUIRED[kind] - set(doc)
    if missing:
        raise NetworkSemanticError(f"{where}: missing required keys {sorted(missing)}")

    if kind in ("concat", "add"):
        feeds = doc["inputs"]
        if not isinstance(feeds, list) or len(feeds) < 2:
            raise NetworkSemanticError(f"{where}: inputs must list at least two layers")
        for feed in feeds:
            if feed not in seen:
                raise NetworkSemanticError(f"{where}: input {feed!r} does not name an earlier layer")
        return LayerSpec(kind=kind, name=name, inputs=tuple(feeds))

    inputs = ()
    if "input" in doc:
        feed = doc["input"]
        if feed not in seen:
            raise NetworkSemanticError(f"{where}: input {feed!r} does not name an earlier layer")
        inputs = (feed,)

    kernel = (1, 1)
    if "kernel" in doc:
        raw = doc["kernel"]
        if not isinstance(raw, list) or len(raw) != 2:
            raise NetworkSemanticError(f"{where}: kernel must be a [height, width] pair")
        kernel = (_require_int(raw[0], f"{where}: kernel height", 1),
                  _require_int(raw[1], f"{where}: kernel width", 1))

    stride = _require_int(doc.get("stride", 1), f"{where}: stride", 1)
    pad = _require_int(doc.get("pad", 0), f"{where}: pad", 0)
    groups = _require_int(doc.get("groups", 1), f"{where}: groups", 1)
    bias = doc.get("bias", True)
    if not isinstance(bias, bool):
        raise NetworkSemanticError(f"{where}: bias must be a boolean")
    out_channels = 0
    if kind in ("conv", "fc"):
        out_channels = _require_int(doc["out_channels"], f"{where}: out_channels", 1)
    connections = None
    if "connections" in doc:
        connections = _require_int(doc["connections"], f"{where}: connections", 1)

    if kind == "fc":
        return LayerSpec(kind="fc", name=name, out_channels=out_channels,
                         bias=bias, inputs=inputs)
    if kind == "pool":
        return LayerSpec(kind="pool", name=name, kernel=kernel, stride=stride,
                         pad=pad, inputs=inputs)
    if kind == "act":
        return LayerSpec(kind="act", name=name, inputs=inputs)
    return LayerSpec(kind="conv", name=name, out_channels=out_channels,
                     kernel=kernel, stride=stride, pad=pad, groups=groups,
                     bias=bias, connections=connections, inputs=inputs)


def parse_network(text: str) -> NetworkSpec:
    """Parse a JSON network description into a NetworkSpec."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkSyntaxError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetworkSyntaxError("top level must be an object")
    unknown = set(doc) - {"name", "input", "layers"}
    if unknown:
        raise NetworkSemanticError(f"unknown top-level keys {sorted(unknown)}")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise NetworkSemanticError("missing or empty network name")
    shape = doc.get("input")
    if not isinstance(shape, dict) or set(shape) != {"channels", "height", "width"}:
        raise NetworkSemanticError("input must be an object with channels, height, width")
    channels = _require_int(shape["channels"], "input channels", 1)
    height = _require_int(shape["height"], "input height", 1)
    width = _require_int(shape["width"], "input width", 1)
    raw_layers = doc.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise NetworkSemanticError("layers must be a non-empty list")

    layers = []
    seen: set[str] = set()
    for index, raw in enumerate(raw_layers):
        spec = _parse_layer(raw, index, seen)
        seen.add(spec.name)
        layers.append(spec)
    return NetworkSpec(name=name, in_channels=channels, in_height=height,
                       in_width=width, layers=tuple(layers))


def _layer_doc(spec: LayerSpec) -> dict:
    doc: dict = {"type": spec.kind, "name": spec.name}
    if spec.kind in ("concat", "add"):
        doc["inputs"] = list(spec.inputs)
        return doc
    if spec.kind == "conv":
        doc["out_channels"] = spec.out_channels
        doc["kernel"] = list(spec.kernel)
        doc["stride"] = spec.stride
        doc["pad"] = spec.pad
        doc["groups"] = spec.groups
        doc["bias"] = spec.bias
        if spec.connections is not None:
            doc["connections"] = spec.connections
    elif spec.kind == "fc":
        doc["out_channels"] = spec.out_channels
        doc["bias"] = spec.bias
    elif spec.kind == "pool":
        doc["kernel"] = list(spec.kernel)
        doc["stride"] = spec.stride
        doc["pad"] = spec.pad
    if spec.inputs:
        doc["input"] = spec.inputs[0]
    return doc


def serialize_network(net: NetworkSpec) -> str:
    """Serialize a NetworkSpec back to its JSON document form."""
    doc = {
        "name": net.name,
        "input": {"channels": net.in_channels, "height": net.in_height,
                  "width": net.in_width},
        "layers": [_layer_doc(spec) for spec in net.layers],
    }
    return json.dumps(doc, indent=2)


def _out_extent(extent, kernel, stride, pad, spec):
    out = (extent - kernel + 2 * pad) // stride + 1
    if out < 1:
        raise ShapeError(
            f"layer {spec.name!r}: kernel {spec.kernel} does not fit input extent "
            f"{extent} with stride {spec.stride}, pad {spec.pad}")
    return out


def resolve_shapes(net: NetworkSpec, batch: int = 1) -> ResolvedNetwork:
    """Propagate shapes through the layer list.

    Output extents follow E = floor((H - R + 2 * pad) / stride) + 1 per
    spatial dimension. Raises ShapeError when a kernel does not fit or a
    channel count does not divide by the group count.
    """
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    out_shapes: dict[str, tuple[int, int, int]] = {}
    resolved = []
    prev: str | None = None
    for spec in net.layers:
        if spec.inputs:
            feed_names = spec.inputs
        elif prev is None:
            feed_names = ()
        else:
            feed_names = (prev,)
        if feed_names:
            feeds = [out_shapes[nm] for nm in feed_names]
        else:
            feeds = [(net.in_channels, net.in_height, net.in_width)]

        if spec.kind == "concat":
            heights = {hw for _, hw, _ in feeds}
            widths = {w for _, _, w in feeds}
            if len(heights) != 1 or len(widths) != 1:
                raise ShapeError(f"layer {spec.name!r}: concat feeds disagree on spatial size")
            c = sum(ch for ch, _, _ in feeds)
            h, w = feeds[0][1], feeds[0][2]
            layer = ResolvedLayer(kind="concat", name=spec.name, in_channels=c,
                                  in_height=h, in_width=w, out_channels=c,
                                  out_height=h, out_width=w, kernel=(1, 1),
                                  stride=1, pad=0, groups=1, bias=False,
                                  connections=None, inputs=feed_names)
        elif spec.kind == "add":
            if len(set(feeds)) != 1:
                raise ShapeError(f"layer {spec.name!r}: add feeds disagree on shape")
            c, h, w = feeds[0]
            layer = ResolvedLayer(kind="add", name=spec.name, in_channels=c,
                                  in_height=h, in_width=w, out_channels=c,
                                  out_height=h, out_width=w, kernel=(1, 1),
                                  stride=1, pad=0, groups=1, bias=False,
                                  connections=None, inputs=feed_names)
        else:
            c, h, w = feeds[0]
            if spec.kind == "conv":
                if c % spec.groups or spec.out_channels % spec.groups:
                    raise ShapeError(
                        f"layer {spec.name!r}: channels {c} -> {spec.out_channels} "
                        f"not divisible by groups {spec.groups}")
                r, s = spec.kernel
                e = _out_extent(h, r, spec.stride, spec.pad, spec)
                f = _out_extent(w, s, spec.stride, spec.pad, spec)
                dense = spec.out_channels * (c // spec.groups)
                if spec.connections is not None and spec.connections > dense:
                    raise ShapeError(
                        f"layer {spec.name!r}: connections {spec.connections} exceeds "
                        f"dense wiring {dense}")
                layer = ResolvedLayer(kind="conv", name=spec.name, in_channels=c,
                                      in_height=h, in_width=w,
                                      out_channels=spec.out_channels,
                                      out_height=e, out_width=f, kernel=(r, s),
                                      stride=spec.stride, pad=spec.pad,
                                      groups=spec.groups, bias=spec.bias,
                                      connections=spec.connections,
                                      inputs=feed_names)
            elif spec.kind == "fc":
                layer = ResolvedLayer(kind="fc", name=spec.name, in_channels=c,
                                      in_height=h, in_width=w,
                                      out_channels=spec.out_channels,
                                      out_height=1, out_width=1, kernel=(h, w),
                                      stride=1, pad=0, groups=1, bias=spec.bias,
                                      connections=None, inputs=feed_names)
            elif spec.kind == "pool":
                r, s = spec.kernel
                e = _out_extent(h, r, spec.stride, spec.pad, spec)
                f = _out_extent(w, s, spec.stride, spec.pad, spec)
                layer = ResolvedLayer(kind="pool", name=spec.name, in_channels=c,
                                      in_height=h, in_width=w, out_channels=c,
                                      out_height=e, out_width=f, kernel=(r, s),
                                      stride=spec.stride, pad=spec.pad, groups=1,
                                      bias=False, connections=None,
                                      inputs=feed_names)
            else:  # act
                layer = ResolvedLayer(kind="act", name=spec.name, in_channels=c,
                                      in_height=h, in_width=w, out_channels=c,
                                      out_height=h, out_width=w, kernel=(1, 1),
                                      stride=1, pad=0, groups=1, bias=False,
                                      connections=None, inputs=feed_names)

        out_shapes[spec.name] = (layer.out_channels, layer.out_height, layer.out_width)
        resolved.append(layer)
        prev = spec.name
    return ResolvedNetwork(name=net.name, batch=batch, in_channels=net.in_channels,
                           in_height=net.in_height, in_width=net.in_width,
                           layers=tuple(resolved))
