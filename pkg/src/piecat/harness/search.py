"""Counterexample hunt for inserters along arbitrary functors.

For random proxies ``K1``, targets ``K2`` and arbitrary parallel functors
``F, G: K1 -> K2``, the inserter ``Ins(F, G)`` is built with ``U1∘P`` and its
canonical embedding is tested for iso-fullness. A failure is re-verified by
the definitional checker in :mod:`piecat.oracles` and written out as a
candidate workspace. Instances where both functors turn out subconcrete are
tracked separately: a failure there would contradict the subconcrete
inserter suite and is flagged as an inconsistency.
"""

from __future__ import annotations

import os
import random
import time
from pathlib import Path

from ..core import FAIL, PASS, BudgetExceeded, Functor, Verdict, constant_functor, identity_functor
from ..dsl import parse
from ..functors import find_subconcrete_witness
from ..limits import inserter
from ..oracles import iso_full_definitional
from ..signatures import canonical_e, classify_aec, is_iso_full, sigma_atoms
from .generate import random_aec_proxy, random_functor, random_subconcrete_family
from .suites import SKIP, InstanceRecord, SuiteReport, certificate, instance_seed

SCOPE_NOTE = (
    "A finite failure of inserter iso-fullness is a finite-scale anomaly only. "
    "Whether it extends to a genuine counterexample among accessible categories "
    "is a mathematical question that this search does not decide."
)
WITNESS_BUDGET = 20_000


def _draw(rng: random.Random):
    """Source proxy, target, two parallel functors and a label."""
    mode = rng.random()
    if mode < 0.25:
        fam = None
        while fam is None:
            fam = random_subconcrete_family(rng, max_objects=24)
        k1, k2 = fam.k1.concrete, fam.k2.concrete
        f, g = rng.choice(fam.functors), rng.choice(fam.functors)
        return k1, k2, f, g, "subconcrete-family"
    pr = None
    while pr is None:
        pr = random_aec_proxy(rng, pool_size=3, max_carrier=2, name="K1", max_objects=16)
    k1 = pr.concrete
    if mode < 0.3:
        ident = identity_functor(k1.cat, "Id")
        return k1, k1, ident, ident, "identity"
    tgt = None
    while tgt is None:
        tgt = random_aec_proxy(rng, pool_size=3, max_carrier=2, name="K2", max_objects=16)
    k2 = tgt.concrete
    picks = []
    for _ in range(2):
        h = None
        if rng.random() < 0.8:
            h = random_functor(rng, k1.cat, k2.cat, "H", node_budget=5_000)
        if h is None:
            h = constant_functor(k1.cat, k2.cat, rng.choice(k2.cat.objects), "H")
        picks.append(h)
    return k1, k2, picks[0], picks[1], "arbitrary"


def _subconcrete(h: Functor, k1, k2) -> bool | None:
    try:
        return find_subconcrete_witness(h, k1, k2, WITNESS_BUDGET) is not None
    except BudgetExceeded:
        return None


def search_problem29(
    n: int = 10_000,
    seed: int = 0,
    budget: float = 600.0,
    out_dir: str | os.PathLike | None = None,
    progress=None,
) -> SuiteReport:
    """Run until ``n`` instances or ``budget`` seconds; failures count as candidates, not errors."""
    report = SuiteReport("search29", seed, min_quota=0.0, failures_expected=True)
    report.notes.append(SCOPE_NOTE)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    inconsistent = 0
    disagreements = 0
    sub_instances = 0
    for i in range(n):
        if time.perf_counter() - start > budget:
            report.partial = True
            report.notes.append(f"time budget of {budget:g}s exhausted after {i} instances")
            break
        s = instance_seed(seed, i)
        rng = random.Random(s)
        k1, k2, f, g, label = _draw(rng)
        f = Functor(f.source, f.target, f.obj_map, f.mor_map, "F")
        g = Functor(g.source, g.target, g.obj_map, g.mor_map, "G")
        sf, sg = _subconcrete(f, k1, k2), _subconcrete(g, k1, k2)
        sub = True if (sf and sg) else (None if None in (sf, sg) else False)
        ins = inserter(f, g, k1.u, "Ins")
        ic = ins.concrete
        details = {"label": label, "subconcrete": sub, "inserter_objects": len(ins.cat.objects)}
        if sub:
            sub_instances += 1
        try:
            v = is_iso_full(canonical_e(ic, sigma_atoms(ic)))
        except BudgetExceeded as exc:
            report.records.append(InstanceRecord(i, s, SKIP, str(exc), label, details=details))
            continue
        if v:
            rec = InstanceRecord(i, s, PASS, kind=label, details=details)
        else:
            definitional_ok, _ = iso_full_definitional(ic)
            cert = certificate(k1, k2, f, g) if k2 is not k1 else certificate(k1, f, g)
            if definitional_ok:
                disagreements += 1
                details["disagreement"] = True
            if sub:
                inconsistent += 1
            details["witness"] = repr(v.witness)
            details["source_aec"] = classify_aec(k1).ok
            details["target_aec"] = classify_aec(k2).ok
            rec = InstanceRecord(i, s, FAIL, f"inserter is not iso-full: {v.reason}", label, cert, details)
            if out is not None and cert is not None and not definitional_ok:
                path = out / f"candidate_{seed}_{i}.cat"
                path.write_text(f"# search29 candidate, seed {s}\n# {SCOPE_NOTE}\n" + cert, encoding="utf-8")
                details["path"] = str(path)
        report.records.append(rec)
        if progress is not None:
            progress(rec)
    report.wall_time = time.perf_counter() - start
    report.notes.append(
        f"candidates={report.failed} subconcrete_instances={sub_instances} "
        f"subconcrete_failures={inconsistent} checker_disagreements={disagreements}"
    )
    report.consistency = {
        "subconcrete_instances": sub_instances,
        "subconcrete_failures": inconsistent,
        "checker_disagreements": disagreements,
    }
    return report


def search_consistent(report: SuiteReport) -> bool:
    c = getattr(report, "consistency", {})
    return c.get("subconcrete_failures", 1) == 0 and c.get("checker_disagreements", 1) == 0


def recheck29(text: str) -> Verdict:
    """Rebuild ``Ins(F, G)`` from a candidate workspace and re-run both iso-full checks.

    The verdict fails when the candidate still exhibits the failure.
    """
    ws = parse(text)
    f, g = ws.functors["F"], ws.functors["G"]
    src = ws.category_name(f.source)
    k1 = ws.concrete(src)
    ins = inserter(f, g, k1.u, "Ins")
    ic = ins.concrete
    fast = is_iso_full(canonical_e(ic, sigma_atoms(ic)))
    slow, wit = iso_full_definitional(ic)
    if bool(fast) != slow:
        return Verdict.structural("recheck29", "iso-full checkers disagree")
    if slow:
        return Verdict.passed("recheck29", "inserter is iso-full; candidate does not reproduce")
    return Verdict.failed("recheck29", "inserter is not iso-full", *wit)
