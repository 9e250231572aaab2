"""Classification records and their csv / json / markdown renderings."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .balance import upper_exponent
from .cube import lower_exponent
from .predicates import SymmetricPredicate, enumerate_nontrivial

HEADER = ("idx", "W", "|R|", "u", "l", "mismatch")
FORMATS = ("csv", "json", "md")


@dataclass(frozen=True)
class ClassificationRecord:
    index: int
    predicate: SymmetricPredicate
    relation_size: int
    upper_exponent: int
    lower_exponent: int

    @property
    def mismatch(self) -> bool:
        return self.upper_exponent != self.lower_exponent

    def row(self) -> tuple:
        return (self.index, self.predicate.label, self.relation_size,
                self.upper_exponent, self.lower_exponent, "yes" if self.mismatch else "no")

    def to_json(self) -> dict:
        return {
            "idx": self.index,
            "W": sorted(self.predicate.weights),
            "size": self.relation_size,
            "u": self.upper_exponent,
            "l": self.lower_exponent,
            "mismatch": self.mismatch,
        }


def _exponents(pred: SymmetricPredicate) -> tuple[int, int]:
    return upper_exponent(pred), lower_exponent(pred)


def classify(arity: int, parallel: bool = False) -> list[ClassificationRecord]:
    preds = enumerate_nontrivial(arity)
    if parallel and len(preds) > 1:
        with ProcessPoolExecutor() as pool:
            exps = list(pool.map(_exponents, preds))
    else:
        exps = [_exponents(p) for p in preds]
    return [
        ClassificationRecord(i, p, p.relation_size(), u, l)
        for i, (p, (u, l)) in enumerate(zip(preds, exps), start=1)
    ]


def render(records: list[ClassificationRecord], fmt: str, arity: int) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(rec.row() for rec in records)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps({"arity": arity, "records": [rec.to_json() for rec in records]},
                          indent=2) + "\n"
    if fmt == "md":
        lines = ["| " + " | ".join(HEADER) + " |", "|" + "---|" * len(HEADER)]
        lines += ["| " + " | ".join(str(c) for c in rec.row()) + " |" for rec in records]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
