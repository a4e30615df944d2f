"""Brute-force countermodel search.

Models are enumerated in ascending domain-size order (smallest total size
first), and within one frame lexicographically over the interpretations of
the declared constants (sorted by name, value spaces enumerated with the
nowhere-defined map first).  The first model falsifying the sequent is
returned together with its falsifying assignment, so the smallest witness
is found and the search is reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .judgments import Sequent
from .semantics import (
    DEFAULT_CAP,
    Assignment,
    Model,
    sequent_valid,
)
from .signature import Signature

_I_NAMES = ("a", "b", "c", "d")
_W_NAMES = ("w1", "w2", "w3", "w4")


@dataclass
class SearchBounds:
    max_i: int = 3
    max_w: int = 2
    cap: int = DEFAULT_CAP


@dataclass
class SearchResult:
    model: Optional[Model]
    witness: Optional[Assignment]
    models_checked: int

    @property
    def found(self) -> bool:
        return self.model is not None


def enumerate_models(sig: Signature, bounds: SearchBounds) -> Iterator[Model]:
    """All models of the signature within the domain-size bounds.

    Models violating a `distinct` declaration are skipped.
    """
    sizes = sorted(
        itertools.product(
            range(1, bounds.max_i + 1), range(1, bounds.max_w + 1)
        ),
        key=lambda s: (s[0] + s[1], s[0]),
    )
    names = sorted(sig.constants)
    for ni, nw in sizes:
        frame = Model(
            sig,
            {"i": _I_NAMES[:ni], "w": _W_NAMES[:nw]},
            {},
            bounds.cap,
        )
        spaces = [frame.domain_values(sig.constants[n]) for n in names]
        for combo in itertools.product(*spaces):
            interp = dict(zip(names, combo))
            if any(
                interp.get(a) == interp.get(b)
                for g in sig.distinct_groups
                for a in g
                for b in g
                if a < b and a in interp and b in interp
            ):
                continue
            yield Model(sig, dict(frame.domains), interp, bounds.cap)


def find_countermodel(
    sig: Signature, s: Sequent, bounds: SearchBounds | None = None
) -> SearchResult:
    """Search the bounded model space for one falsifying the sequent."""
    bounds = bounds or SearchBounds()
    checked = 0
    for model in enumerate_models(sig, bounds):
        checked += 1
        result = sequent_valid(s, model)
        if not result.valid:
            return SearchResult(model, result.witness, checked)
    return SearchResult(None, None, checked)
