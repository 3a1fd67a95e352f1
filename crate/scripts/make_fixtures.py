#!/usr/bin/env python3
"""Regenerate the synthetic test corpus under crates/core/tests/fixtures.

Produces 20 sentence-split opinions with oracle role labels, one reference
summary each, a mock candidate grid (3 input formats x beam widths 1-5, each
candidate a seeded random subset of document sentences) and 5 folds.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"
SEED = 20231

PARTIES = ["the appellant", "the respondent", "the insurer", "the landlord", "the tenant",
           "the employer", "the Crown", "the plaintiff", "the defendant", "the Board"]
STATUTES = ["the Residential Tenancies Act", "the Insurance Act", "the Employment Standards Act",
            "the Criminal Code", "the Limitations Act", "the Municipal Act"]
ISSUES = [
    "The issue is whether {p} was entitled to rely on {s}.",
    "The question before the court is whether the trial judge erred in interpreting {s}.",
    "At issue is whether {p} owed a duty of care in these circumstances.",
    "The central question is whether the limitation period under {s} had expired.",
]
REASONS = [
    "The evidence shows that {p} had notice of the defect well before the claim was filed.",
    "Under {s}, the burden rests on {p} to establish the exemption.",
    "The trial judge failed to consider the written agreement between the parties.",
    "There was no evidence that {p} acted in bad faith.",
    "The standard of review for questions of law is correctness.",
    "Section 12 of {s} must be read in light of its remedial purpose.",
    "The findings of credibility are entitled to deference on appeal.",
]
CONCLUSIONS = [
    "The appeal is allowed and a new trial is ordered.",
    "The appeal is dismissed with costs to {p}.",
    "The application for judicial review is granted.",
    "The claim against {p} is therefore statute-barred.",
]
FILLER = [
    "The hearing took place over three days in {c}.",
    "{P} was represented by counsel throughout the proceedings.",
    "The facts are largely undisputed.",
    "The parties filed written submissions after the hearing.",
    "Counsel for {p} relied on several earlier decisions.",
    "The motion was originally returnable in {c}.",
    "The record consists of affidavits and transcripts.",
    "Both parties agreed to an abridged timetable.",
]
CITIES = ["Toronto", "Vancouver", "Halifax", "Winnipeg", "Calgary", "Ottawa"]


def fill(rng, template):
    p = rng.choice(PARTIES)
    return template.format(p=p, P=p[0].upper() + p[1:], s=rng.choice(STATUTES), c=rng.choice(CITIES))


def make_document(rng, i):
    n = rng.randint(8, 24)
    sentences = []
    for _ in range(n):
        r = rng.random()
        if r < 0.12:
            role, pool = "Issue", ISSUES
        elif r < 0.32:
            role, pool = "Reason", REASONS
        elif r < 0.40:
            role, pool = "Conclusion", CONCLUSIONS
        else:
            role, pool = "NonArgument", FILLER
        sentences.append({"text": fill(rng, rng.choice(pool)), "role": role})
    if i == 13:
        # one opinion with no argumentative sentence exercises the fallback reference
        for s in sentences:
            s["role"] = "NonArgument"
    return {"doc_id": f"canlii_{i:03d}", "role_source": "oracle", "sentences": sentences}


def make_reference(rng, doc):
    args = [s["text"] for s in doc["sentences"] if s["role"] != "NonArgument"]
    picked = args[:3] if args else [doc["sentences"][0]["text"]]
    extra = fill(rng, rng.choice(FILLER))
    return {"doc_id": doc["doc_id"], "text": " ".join(picked + [extra])}


def make_candidates(rng, doc):
    texts = [s["text"] for s in doc["sentences"]]
    out = []
    for fmt in ["raw", "binary", "finegrained"]:
        for beam in range(1, 6):
            k = rng.randint(2, min(6, len(texts)))
            idx = sorted(rng.sample(range(len(texts)), k))
            out.append({
                "doc_id": doc["doc_id"],
                "text": " ".join(texts[j] for j in idx),
                "input_format": fmt,
                "beam_width": beam,
                "generator_id": "mock-led",
            })
    return out


def make_folds(rng, ids):
    ids = list(ids)
    rng.shuffle(ids)
    folds = []
    for f in range(5):
        test = ids[f * 4:(f + 1) * 4]
        rest = [d for d in ids if d not in test]
        folds.append({"fold_id": f, "train": rest[:14], "validation": rest[14:], "test": test})
    return folds


def dump(name, records):
    with open(OUT / name, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    docs = [make_document(rng, i) for i in range(20)]
    refs = [make_reference(rng, d) for d in docs]
    cands = [c for d in docs for c in make_candidates(rng, d)]
    folds = make_folds(rng, [d["doc_id"] for d in docs])
    dump("documents.jsonl", docs)
    dump("references.jsonl", refs)
    dump("candidates.jsonl", cands)
    dump("folds.jsonl", folds)


if __name__ == "__main__":
    main()
