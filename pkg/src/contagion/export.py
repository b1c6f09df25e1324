"""GraphML and DOT export of exposure or interdependency matrices.

Edges run from the claim holder (row) to the counterparty (column) and carry
the matrix entry as ``weight``; nodes carry equity and country so that
external layout tools can size and colour them.
"""

from __future__ import annotations

import os
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import DimensionMismatch, InputError

FORMATS = ("graphml", "dot")


def _matrix(x):
    for attr in ("x", "a"):
        if hasattr(x, attr):
            x = getattr(x, attr)
            break
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {x.shape}")
    return x


def _edges(x, link_threshold):
    n = x.shape[0]
    return [(i, j, float(x[i, j])) for i in range(n) for j in range(n) if i != j and x[i, j] > link_threshold]


def _graphml(ids, x, equity, country, link_threshold):
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="equity" for="node" attr.name="equity" attr.type="double"/>',
        '  <key id="country" for="node" attr.name="country" attr.type="string"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <graph id="G" edgedefault="directed">',
    ]
    for k, bank in enumerate(ids):
        data = ""
        if equity is not None:
            data += f'<data key="equity">{float(equity[k])!r}</data>'
        if country is not None:
            data += f'<data key="country">{escape(str(country[k]))}</data>'
        out.append(f"    <node id={quoteattr(str(bank))}>{data}</node>")
    for i, j, w in _edges(x, link_threshold):
        out.append(
            f"    <edge source={quoteattr(str(ids[i]))} target={quoteattr(str(ids[j]))}>"
            f'<data key="weight">{w!r}</data></edge>'
        )
    out += ["  </graph>", "</graphml>", ""]
    return "\n".join(out)


def _dot_id(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(ids, x, equity, country, link_threshold):
    out = ["digraph G {"]
    for k, bank in enumerate(ids):
        attrs = []
        if equity is not None:
            attrs.append(f"equity={float(equity[k])!r}")
        if country is not None:
            attrs.append(f"country={_dot_id(country[k])}")
        out.append(f"  {_dot_id(bank)}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for i, j, w in _edges(x, link_threshold):
        out.append(f"  {_dot_id(ids[i])} -> {_dot_id(ids[j])} [weight={w!r}];")
    out += ["}", ""]
    return "\n".join(out)


def export_graph(matrix, path, fmt="graphml", bank_ids=None, equity=None, country=None,
                 link_threshold=0.0) -> str:
    """Write `matrix` as a directed weighted graph; returns the text written.

    Diagonal entries and entries at or below `link_threshold` are omitted.
    Nodes and edges appear in bank index order, so output is reproducible.
    """
    x = _matrix(matrix)
    n = x.shape[0]
    if fmt not in FORMATS:
        raise InputError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")
    ids = [str(i) for i in range(n)] if bank_ids is None else list(bank_ids)
    for name, seq in (("bank_ids", ids), ("equity", equity), ("country", country)):
        if seq is not None and len(seq) != n:
            raise DimensionMismatch(f"{name} has {len(seq)} entries for {n} banks")
    render = _graphml if fmt == "graphml" else _dot
    text = render(ids, x, equity, country, link_threshold)
    if path is not None:
        with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
