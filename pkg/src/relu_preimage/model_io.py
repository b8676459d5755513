"""Model, vector and report files.

Model files are line-oriented text (see docs/FORMAT.md) with an optional
raw little-endian float32 block per layer. Everything is widened to float64
on load. The canonical text encoding writes every value with 17 significant
digits, so ``save_model(load_model(f))`` reproduces a canonical file byte for
byte.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .errors import (DimensionMismatch, MalformedHeader, MalformedValue,
                     NonFiniteValue, SizeMismatch, TrailingData, TruncatedFile,
                     UnknownActivation, UnsupportedVersion)
from .preimage import AffineLayer
from .stability import ACTIVATIONS, MlpModel

MAGIC = "relu-mlp"
VERSION = 1
ENCODINGS = ("text", "f32le")


def fmt(v: float) -> str:
    return "%.17g" % v


class _Reader:
    """Byte cursor that hands out text lines and raw blocks with positions."""

    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.line = 0
        self.path = path

    def at_end(self) -> bool:
        return self.pos >= len(self.data)

    def next_line(self, what: str) -> str:
        if self.at_end():
            raise TruncatedFile(f"unexpected end of file, expected {what}", self.path, self.line + 1)
        end = self.data.find(b"\n", self.pos)
        if end < 0:
            end = len(self.data)
        raw = self.data[self.pos:end]
        self.pos = end + 1
        self.line += 1
        try:
            return raw.decode("ascii").rstrip("\r")
        except UnicodeDecodeError:
            raise MalformedHeader(f"non-ASCII bytes where {what} was expected", self.path, self.line)

    def block(self, nbytes: int) -> bytes:
        start = self.pos
        if start + nbytes > len(self.data):
            raise TruncatedFile(f"binary block needs {nbytes} bytes, {len(self.data) - start} left",
                                self.path, offset=start)
        self.pos += nbytes
        if self.data[self.pos:self.pos + 1] != b"\n":
            raise SizeMismatch("binary block not terminated by newline", self.path, offset=self.pos)
        self.pos += 1
        self.line += 1
        return self.data[start:start + nbytes]


def _parse_floats(text: str, expected: int, what: str, path, line: int) -> np.ndarray:
    tokens = text.split()
    if len(tokens) != expected:
        raise SizeMismatch(f"{what}: expected {expected} values, found {len(tokens)}", path, line)
    out = np.empty(expected)
    for i, tok in enumerate(tokens):
        try:
            v = float(tok)
        except ValueError:
            raise MalformedValue(f"{what}: cannot parse {tok!r}", path, line)
        if not math.isfinite(v):
            raise NonFiniteValue(f"{what}: non-finite value {tok!r}", path, line)
        out[i] = v
    return out


def _parse_int(tok: str, what: str, path, line: int, minimum: int = 1) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise MalformedHeader(f"{what} must be an integer, got {tok!r}", path, line)
    if v < minimum:
        raise MalformedHeader(f"{what} must be >= {minimum}, got {v}", path, line)
    return v


def parse_model(data: bytes, path=None) -> MlpModel:
    r = _Reader(data, path)
    head = r.next_line("header").split()
    if len(head) != 2 or head[0] != MAGIC:
        raise MalformedHeader(f"expected '{MAGIC} {VERSION}' header", path, r.line)
    if head[1] != str(VERSION):
        raise UnsupportedVersion(f"unsupported format version {head[1]!r}", path, r.line)
    decl = r.next_line("layer count").split()
    if len(decl) != 2 or decl[0] != "layers":
        raise MalformedHeader("expected 'layers <count>'", path, r.line)
    count = _parse_int(decl[1], "layer count", path, r.line)

    layers, acts = [], []
    for l in range(1, count + 1):
        hdr = r.next_line(f"layer {l} header")
        parts = hdr.split()
        if len(parts) != 6 or parts[0] != "layer":
            if parts[:1] == ["end"]:
                raise SizeMismatch(f"declared {count} layers, found {l - 1}", path, r.line)
            raise MalformedHeader("expected 'layer <index> <rows> <cols> <activation> <encoding>'",
                                  path, r.line)
        if _parse_int(parts[1], "layer index", path, r.line) != l:
            raise MalformedHeader(f"layer index {parts[1]} out of sequence (expected {l})", path, r.line)
        rows = _parse_int(parts[2], "rows", path, r.line)
        cols = _parse_int(parts[3], "cols", path, r.line)
        act, enc = parts[4], parts[5]
        if act not in ACTIVATIONS:
            raise UnknownActivation(f"unknown activation {act!r}", path, r.line)
        if enc not in ENCODINGS:
            raise MalformedHeader(f"unknown encoding {enc!r}", path, r.line)
        if layers and cols != layers[-1].rows:
            raise DimensionMismatch(
                f"layer {l} takes {cols} inputs but layer {l - 1} emits {layers[-1].rows}", path, r.line)
        if enc == "text":
            W = np.empty((rows, cols))
            for i in range(rows):
                W[i] = _parse_floats(r.next_line(f"weight row {i + 1}"), cols, f"layer {l} weight row {i + 1}",
                                     path, r.line)
            b = _parse_floats(r.next_line("bias"), rows, f"layer {l} bias", path, r.line)
        else:
            start = r.pos
            raw = r.block(4 * (rows * cols + rows))
            vals = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            bad = np.flatnonzero(~np.isfinite(vals))
            if bad.size:
                raise NonFiniteValue(f"layer {l}: non-finite float32", path, offset=start + 4 * int(bad[0]))
            W = vals[:rows * cols].reshape(rows, cols)
            b = vals[rows * cols:]
        layers.append(AffineLayer(W, b))
        acts.append(act)
    tail = r.next_line("'end'")
    if tail.strip() != "end":
        if tail.split()[:1] == ["layer"]:
            raise SizeMismatch(f"more layers present than the declared {count}", path, r.line)
        raise MalformedHeader("expected 'end'", path, r.line)
    if r.data[r.pos:].strip():
        raise TrailingData("data after 'end'", path, r.line + 1)
    return MlpModel(tuple(layers), tuple(acts))


def load_model(path) -> MlpModel:
    path = Path(path)
    return parse_model(path.read_bytes(), path)


def dump_model(model: MlpModel, encoding: str = "text") -> bytes:
    if encoding not in ENCODINGS:
        raise ValueError(f"unknown encoding {encoding!r}")
    out = io.BytesIO()
    out.write(f"{MAGIC} {VERSION}\nlayers {len(model.layers)}\n".encode("ascii"))
    for l, (layer, act) in enumerate(zip(model.layers, model.activations), start=1):
        out.write(f"layer {l} {layer.rows} {layer.cols} {act} {encoding}\n".encode("ascii"))
        if encoding == "text":
            for row in layer.weight:
                out.write((" ".join(fmt(v) for v in row) + "\n").encode("ascii"))
            out.write((" ".join(fmt(v) for v in layer.bias) + "\n").encode("ascii"))
        else:
            block = np.concatenate([layer.weight.ravel(), layer.bias]).astype("<f4")
            out.write(block.tobytes())
            out.write(b"\n")
    out.write(b"end\n")
    return out.getvalue()


def save_model(model: MlpModel, path, encoding: str = "text") -> None:
    Path(path).write_bytes(dump_model(model, encoding))


def _parse_token(tok: str, path, line: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MalformedValue(f"cannot parse {tok!r}", path, line)
    if not math.isfinite(v):
        raise NonFiniteValue(f"non-finite value {tok!r}", path, line)
    return v


def _content_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield i, s


def load_vectors(path) -> list:
    """Vectors from a file.

    ``*.csv``: one vector per row. Anything else: one float per line, read
    as a single vector. Blank lines and ``#`` comments are skipped; an empty
    file gives an empty list.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        out = []
        width = None
        for i, s in _content_lines(text):
            row = next(csv.reader([s]))
            vec = np.array([_parse_token(t.strip(), path, i) for t in row])
            if width is not None and vec.size != width:
                raise SizeMismatch(f"row has {vec.size} values, previous rows {width}", path, i)
            width = vec.size
            out.append(vec)
        return out
    vals = []
    for i, s in _content_lines(text):
        if len(s.split()) != 1:
            raise SizeMismatch("expected one value per line", path, i)
        vals.append(_parse_token(s, path, i))
    return [np.array(vals)] if vals else []


def load_vector(path) -> np.ndarray:
    vecs = load_vectors(path)
    if len(vecs) != 1:
        raise SizeMismatch(f"expected exactly one vector, found {len(vecs)}", Path(path))
    return vecs[0]


def save_vectors(vectors, path) -> None:
    path = Path(path)
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if path.suffix.lower() == ".csv":
        path.write_text("".join(",".join(fmt(x) for x in v) + "\n" for v in vectors))
        return
    if len(vectors) > 1:
        raise ValueError("non-CSV vector files hold a single vector")
    path.write_text("".join(fmt(x) + "\n" for v in vectors for x in v))


def load_matrix(path) -> np.ndarray:
    """Rows separated by newlines; entries by commas or whitespace."""
    path = Path(path)
    rows = []
    for i, s in _content_lines(path.read_text()):
        toks = s.replace(",", " ").split()
        row = [_parse_token(t, path, i) for t in toks]
        if rows and len(row) != len(rows[0]):
            raise SizeMismatch(f"row has {len(row)} entries, previous rows {len(rows[0])}", path, i)
        rows.append(row)
    if not rows:
        raise SizeMismatch("matrix file is empty", path)
    return np.array(rows, dtype=np.float64)


REPORT_COLUMNS = ("layer_index", "stage", "stat", "value", "n_samples")


def report_to_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for li, stage, stat, value, n in report.rows:
        w.writerow([li, stage, stat, fmt(value), n])
    return buf.getvalue()


def save_report(report, path) -> None:
    Path(path).write_text(report_to_csv(report))


SWEEP_COLUMNS = ("c", "max_count", "best_row", "m_remaining")


def sweep_to_csv(sweep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for c, cnt, k in zip(sweep.c_grid, sweep.max_counts, sweep.best_rows):
        w.writerow([fmt(c), int(cnt), int(k), sweep.m_remaining])
    return buf.getvalue()
