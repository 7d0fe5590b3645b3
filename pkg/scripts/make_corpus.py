"""Regenerate the machine-made part of the bundled corpus.

Hand-written files in the corpus directory are left alone; files written
here carry a ``# generated`` header so they are easy to tell apart.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

from piecat.dsl import parse
from piecat.harness.generate import (
    GeneratorConfig,
    random_aec_proxy,
    random_subconcrete_family,
    sample,
    sets_with_injections,
)
from piecat.harness.search import search_problem29
from piecat.harness.suites import certificate, suite_lemma35

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "src" / "piecat" / "corpus"


def emit(out: Path, stem: str, note: str, text: str) -> None:
    parse(text)  # never ship a file the parser rejects
    (out / f"{stem}.cat").write_text(f"# generated: {note}\n{text}", encoding="utf-8")
    print(stem)


def smallest(records):
    return min(records, key=lambda r: len(r.certificate or ""))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    for size in (1, 2):
        k = sets_with_injections(("a", "b"), size, f"Inj{size}")
        emit(out, f"inj_le{size}", f"subsets of {{a, b}} of size at most {size} with injections", certificate(k))

    made = 0
    while made < 3:
        pr = random_aec_proxy(rng, pool_size=3, max_carrier=2, name=f"P{made}", max_objects=12)
        if pr is not None and len(pr.concrete.cat.objects) >= 3:
            emit(out, f"aec_proxy_{made}", "iso-closed class of finite structures with embeddings", certificate(pr.concrete))
            made += 1

    fam = None
    while fam is None or len(fam.k2.concrete.cat.objects) > 10:
        fam = random_subconcrete_family(rng, max_objects=10)
    emit(
        out,
        "subconcrete_family",
        "a reduct functor Red and a restriction functor Res",
        certificate(fam.k1.concrete, fam.k2.concrete, *fam.functors),
    )

    cfg = GeneratorConfig(seed=args.seed, max_objects=3, max_carrier=2, max_morphisms=8)
    for i in range(4):
        k = sample(rng, cfg, f"R{i}")
        emit(out, f"random_{i}", f"random concrete category, seed {args.seed}", certificate(k))

    lem = suite_lemma35(n=100, seed=args.seed)
    if lem.failures():
        emit(out, "lemma35_failure", "restriction functor that is subconcrete but not coherent", smallest(lem.failures()).certificate)

    s29 = search_problem29(n=400, seed=args.seed)
    if s29.failures():
        emit(out, "search29_candidate", "inserter that is not iso-full (finite-scale only)", smallest(s29.failures()).certificate)


if __name__ == "__main__":
    main()
