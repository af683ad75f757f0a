"""Trained model container and its on-disk text format.

A model is a vocabulary of named boxes plus the product measure they live
under.  The file format is line-oriented text with 17-significant-digit
decimals, which round-trips float64 exactly: save -> load -> save is
byte-identical and reloaded volumes match bit for bit.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .boxes import Box
from .errors import DataFormatError, DimensionMismatch, UnknownConcept
from .measures import ProductMeasure

FORMAT_VERSION = 1
_MAGIC = "boxlat-model"


def _fmt(x: float) -> str:
    return "%.17g" % x


@dataclass
class Model:
    """Named boxes under a shared measure; poe marks max-pinned models."""

    measure: ProductMeasure
    boxes: dict[str, Box] = field(default_factory=dict)
    poe: bool = False

    @property
    def dim(self) -> int:
        return self.measure.dim

    def __len__(self):
        return len(self.boxes)

    def __contains__(self, name):
        return name in self.boxes

    def names(self) -> list[str]:
        return list(self.boxes)

    def box(self, name: str) -> Box:
        try:
            return self.boxes[name]
        except KeyError:
            raise UnknownConcept(name) from None

    def add(self, name: str, box: Box):
        if box.dim != self.dim:
            raise DimensionMismatch(
                f"box of dimension {box.dim} in model of dimension {self.dim}"
            )
        self.boxes[name] = box

    def dumps(self) -> str:
        out = io.StringIO()
        header = [
            f"{_MAGIC} {FORMAT_VERSION}",
            f"dim {self.dim}",
            f"measure {self.measure.kind}",
        ]
        if self.measure.kind == "exponential":
            header.append(f"clip {_fmt(self.measure.support[1])}")
        header.append(f"poe {'true' if self.poe else 'false'}")
        header.append(f"vocab {len(self.boxes)}")
        for line in header:
            out.write(line + "\n")
        for name, box in self.boxes.items():
            mins = " ".join(_fmt(v) for v in box.min)
            deltas = " ".join(_fmt(v) for v in box.delta)
            out.write(f"{name}\t{mins}\t{deltas}\n")
        return out.getvalue()

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, path="<string>") -> "Model":
        lines = text.splitlines()
        pos = 0

        def take(expect_key=None):
            nonlocal pos
            if pos >= len(lines):
                raise DataFormatError("unexpected end of model file", path, pos)
            line = lines[pos]
            pos += 1
            if expect_key is not None:
                parts = line.split(None, 1)
                if len(parts) != 2 or parts[0] != expect_key:
                    raise DataFormatError(
                        f"expected '{expect_key} <value>', got {line!r}", path, pos
                    )
                return parts[1]
            return line

        magic = take()
        if magic.split() != [_MAGIC, str(FORMAT_VERSION)]:
            raise DataFormatError(f"bad header {magic!r}", path, 1)
        dim = int(take("dim"))
        kind = take("measure")
        if kind == "uniform":
            measure = ProductMeasure.uniform(dim)
        elif kind == "exponential":
            clip = float(take("clip"))
            measure = ProductMeasure.exponential(dim, clip=clip)
        else:
            raise DataFormatError(f"unknown measure kind {kind!r}", path, pos)
        poe_token = take("poe")
        if poe_token not in ("true", "false"):
            raise DataFormatError(f"poe flag must be true/false, got {poe_token!r}", path, pos)
        vocab = int(take("vocab"))
        model = cls(measure=measure, poe=(poe_token == "true"))
        for _ in range(vocab):
            line = take()
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataFormatError(
                    f"expected 'name<TAB>mins<TAB>deltas', got {line!r}", path, pos
                )
            name, mins, deltas = parts
            try:
                mn = np.array([float(v) for v in mins.split()])
                dl = np.array([float(v) for v in deltas.split()])
            except ValueError as exc:
                raise DataFormatError(str(exc), path, pos) from None
            if mn.shape[0] != dim or dl.shape[0] != dim:
                raise DataFormatError(
                    f"concept {name!r} has {mn.shape[0]}/{dl.shape[0]} values, need {dim}",
                    path,
                    pos,
                )
            model.boxes[name] = Box(mn, dl)
        if pos < len(lines) and any(l.strip() for l in lines[pos:]):
            raise DataFormatError("trailing content after vocabulary", path, pos + 1)
        return model

    @classmethod
    def load(cls, path) -> "Model":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read(), path=str(path))
