"""Write the 20-file dialect golden corpus (10 classic/modern pairs) and its manifest.

Text is formatted here directly, not through the package serializer, so the
corpus exercises the parser against independently produced input.
"""

import argparse
import gzip
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def rand_clauses(rng, n, hard, soft, max_len, max_w):
    out = []
    for _ in range(hard):
        vs = rng.sample(range(1, n + 1), rng.randint(1, max_len))
        out.append(([v if rng.random() < 0.5 else -v for v in vs], None))
    for _ in range(soft):
        vs = rng.sample(range(1, n + 1), rng.randint(1, max_len))
        out.append(([v if rng.random() < 0.5 else -v for v in vs], rng.randint(1, max_w)))
    rng.shuffle(out)
    return out


def cases():
    rng = random.Random(2718)
    yield "pms_small", dict(clauses=[([1, 2], None), ([-1, 3], None), ([1], 1), ([-2], 1), ([-3], 1)])
    yield "wpms_random", dict(clauses=rand_clauses(rng, 12, 10, 25, 3, 50))
    yield "big_weights", dict(clauses=[([1], 2**40), ([-1, 2], None), ([-2], 2**62), ([3], 7)])
    yield "comments", dict(clauses=rand_clauses(rng, 8, 5, 10, 3, 9), comments=True)
    yield "whitespace", dict(clauses=rand_clauses(rng, 10, 6, 12, 4, 9), messy=True)
    yield "dup_literals", dict(clauses=[([1, 1, 2], None), ([-3, -3], 4), ([2, 3, 2, 3], 2), ([-1], 1)])
    yield "tautologies", dict(clauses=[([1, -1], None), ([2, -2, 3], 5), ([1, 2], 3), ([-3], 1), ([3, -3], 2)])
    yield "dup_clauses", dict(clauses=[([1, 2], 3), ([1, 2], 3), ([-1], None), ([-1], None), ([2], 1)])
    yield "gzipped", dict(clauses=rand_clauses(rng, 15, 12, 30, 3, 20), gz=True)
    yield "top_threshold", dict(clauses=rand_clauses(rng, 20, 20, 40, 3, 30), hard_above_top=True)


def normalize(lits, weight):
    seen = list(dict.fromkeys(lits))
    taut = any(-x in seen for x in seen)
    return seen, taut


def expected(clauses):
    out, taut_w = [], 0
    for lits, w in clauses:
        norm, taut = normalize(lits, w)
        if taut:
            taut_w += w or 0
            continue
        out.append({"lits": norm, "weight": w})
    n = max(abs(x) for lits, _ in clauses for x in lits)
    return {"num_vars": n, "clauses": out, "tautology_weight": taut_w}


def sep(rng, messy):
    return rng.choice([" ", "  ", "\t", " \t "]) if messy else " "


def render(clauses, dialect, opts, rng):
    messy = opts.get("messy", False)
    n = max(abs(x) for lits, _ in clauses for x in lits)
    top = sum(w for _, w in clauses if w is not None) + 1
    lines = [f"c golden {dialect}"]
    if dialect == "classic":
        lines.append(f"p wcnf {n} {len(clauses)} {top}")
    for i, (lits, w) in enumerate(clauses):
        if opts.get("comments") and i % 3 == 0:
            lines.append(rng.choice(["c note", "c", "", "c 1 2 3 0"]))
        if w is None:
            if dialect == "modern":
                head = "h"
            else:
                head = str(top + rng.randint(0, 5) if opts.get("hard_above_top") else top)
        else:
            head = str(w)
        s = sep(rng, messy)
        lead = rng.choice(["", " ", "\t"]) if messy else ""
        lines.append(lead + s.join([head] + [str(x) for x in lits] + ["0"]) + (rng.choice(["", " ", "\t"]) if messy else ""))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "data" / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for name, opts in cases():
        rng = random.Random(name)
        files = []
        for dialect in ("classic", "modern"):
            text = render(opts["clauses"], dialect, opts, rng)
            fname = f"{name}.{dialect}.wcnf"
            if opts.get("gz"):
                fname += ".gz"
                (args.out / fname).write_bytes(gzip.compress(text.encode(), mtime=0))
            else:
                (args.out / fname).write_text(text)
            files.append(fname)
        manifest[name] = {"files": files, **expected(opts["clauses"])}
    (args.out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    print(f"wrote {2 * len(manifest)} files to {args.out}")


if __name__ == "__main__":
    main()
