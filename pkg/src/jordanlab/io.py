"""Plain-text color graph files and JSON report documents.

File format::

    # optional comment lines, anywhere
    n r
    c00 c01 ... c0(n-1)
    ...

The header gives the order ``n`` and rank ``r``; each of the ``n`` body rows
holds ``n`` color indices in ``[0, r)``, and every color must be used.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np

from .cc import ColorGraph
from .errors import ParseError


def _tokens(line: str) -> List[Tuple[str, int]]:
    out = []
    col = 0
    for part in line.split():
        col = line.index(part, col)
        out.append((part, col + 1))
        col += len(part)
    return out


def _as_int(tok: str, lineno: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", lineno, col) from None


def parse_colorgraph(text: str) -> ColorGraph:
    """Parse the text format; errors carry line and column numbers."""
    header = None
    rows: List[List[int]] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        last_line = lineno
        if not line or line.startswith("#"):
            continue
        toks = _tokens(raw)
        if header is None:
            if len(toks) != 2:
                raise ParseError("header must be 'n r'", lineno, 1)
            n = _as_int(toks[0][0], lineno, toks[0][1])
            r = _as_int(toks[1][0], lineno, toks[1][1])
            if n < 1 or r < 1:
                raise ParseError("header values must be positive", lineno, 1)
            header = (n, r)
            continue
        n, r = header
        if len(rows) == n:
            raise ParseError(f"more than {n} rows", lineno, 1)
        if len(toks) != n:
            raise ParseError(f"row has {len(toks)} entries, expected {n}", lineno, 1)
        row = []
        for tok, col in toks:
            v = _as_int(tok, lineno, col)
            if not 0 <= v < r:
                raise ParseError(f"color index out of range: {v} (rank {r})", lineno, col)
            row.append(v)
        rows.append(row)
    if header is None:
        raise ParseError("missing header", last_line or 1, 1)
    n, r = header
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, found {len(rows)}", last_line, 1)
    cells = np.array(rows, dtype=np.int64)
    used = np.zeros(r, dtype=bool)
    used[cells.ravel()] = True
    if not used.all():
        raise ParseError(f"unused color index: {int(np.flatnonzero(~used)[0])}", last_line, 1)
    return ColorGraph(cells)


def parse_catalog(text: str) -> List[ColorGraph]:
    """Parse consecutive color graph blocks, as written by :func:`write_catalog`."""
    blocks: List[List[str]] = []
    current: List[str] = []
    remaining = None
    offsets: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if remaining is None:
            toks = line.split()
            if len(toks) != 2:
                raise ParseError("header must be 'n r'", lineno, 1)
            remaining = _as_int(toks[0], lineno, 1)
            current = [raw]
            offsets.append(lineno - 1)
        else:
            current.append(raw)
            remaining -= 1
        if remaining == 0:
            blocks.append(current)
            remaining = None
    if remaining is not None:
        raise ParseError("incomplete final record", len(text.splitlines()), 1)
    out = []
    for start, block in zip(offsets, blocks):
        try:
            out.append(parse_colorgraph("\n".join(block)))
        except ParseError as exc:
            line = None if exc.line is None else exc.line + start
            raise ParseError(exc.message, line, exc.column) from None
    return out


def write_catalog(graphs: Iterable[Tuple[ColorGraph, Iterable[str]]], header: Iterable[str] = ()) -> str:
    """One color graph block per record, each preceded by its comment lines."""
    parts = ["".join(f"# {c}\n" for c in header)]
    for cg, comments in graphs:
        parts.append(write_colorgraph(cg, comments))
    return "".join(parts)


def graph_document(cg: ColorGraph) -> dict:
    return {"n": cg.n, "r": cg.r, "cells": cg.cells.tolist()}


def parse_input(text: str) -> ColorGraph:
    """A color graph from the text format or from a report carrying a ``graph`` entry."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON report: {exc.msg}", exc.lineno, exc.colno) from None
        graph = doc.get("graph") if isinstance(doc, dict) else None
        if not isinstance(graph, dict) or "cells" not in graph:
            raise ParseError("report has no 'graph' entry", 1, 1)
        try:
            cells = np.array(graph["cells"], dtype=np.int64)
        except (TypeError, ValueError):
            raise ParseError("report graph cells are not an integer matrix", 1, 1) from None
        return ColorGraph(cells)
    return parse_colorgraph(text)


def write_colorgraph(cg: ColorGraph, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{cg.n} {cg.r}")
    for row in cg.cells.tolist():
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def read_colorgraph(path: Union[str, Path]) -> ColorGraph:
    return parse_colorgraph(Path(path).read_text())


def save_colorgraph(cg: ColorGraph, path: Union[str, Path], comments: Iterable[str] = ()) -> None:
    Path(path).write_text(write_colorgraph(cg, comments))


def _plain(value):
    """Convert numpy scalars and containers to JSON-safe integers and lists."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, float):
        raise TypeError("reports carry integers only")
    return value


def dump_report(doc: dict) -> str:
    """Serialize a report with insertion-ordered keys and integer values."""
    return json.dumps(_plain(doc), indent=2) + "\n"
