from __future__ import annotations

from pathlib import Path

import pytest

from partialtt.kernel import Kernel
from partialtt.syntax import parse_construction, parse_sequent_from, parse_theory
from partialtt.typecheck import TypingContext

CORPUS = Path(__file__).resolve().parents[1] / "src" / "partialtt" / "corpus"


@pytest.fixture(scope="session")
def kf_sig():
    return parse_theory((CORPUS / "kf.thy").read_text())


@pytest.fixture(scope="session")
def kf_ctx(kf_sig):
    return TypingContext.from_signature(kf_sig)


@pytest.fixture()
def kf_kernel(kf_sig):
    return Kernel(kf_sig)


@pytest.fixture(scope="session")
def parse(kf_ctx):
    def go(text):
        return parse_construction(text, kf_ctx)

    return go


@pytest.fixture(scope="session")
def seq(kf_ctx):
    def go(text):
        return parse_sequent_from(text, kf_ctx)

    return go


def corpus(name: str) -> str:
    return (CORPUS / name).read_text()


def corpus_file(name: str) -> Path:
    return CORPUS / name
