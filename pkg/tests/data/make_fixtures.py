"""Regenerate the toy fixture bundle and the golden outputs.

Run from anywhere: ``python tests/data/make_fixtures.py``. Only rerun after
an intended change to an output format; the golden files pin byte-exact
behaviour.
"""

from __future__ import annotations

import os
import shutil
import sys

from goneg import synthetic
from goneg.annotations import AnnotationRelease
from goneg.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))
TOY = os.path.join(HERE, "toy")
GOLDEN = os.path.join(HERE, "golden")

# (name, argv) pairs; "{toy}" and "{out}" are filled in per run
GOLDEN_RUNS = [
    ("analyze", ["analyze", "--config", "{toy}/run.conf", "--out", "{out}"]),
    ("evaluate", ["evaluate", "--config", "{toy}/run.conf", "--out", "{out}"]),
    ("select_random.csv", ["select", "--config", "{toy}/run.conf", "--method", "random",
                           "--budget", "8", "--seed", "7", "--out", "{out}"]),
    ("select_nsfs-j.csv", ["select", "--config", "{toy}/run.conf", "--method", "nsfs-j",
                           "--k", "0.8", "--budget", "8", "--out", "{out}"]),
    ("similarity", ["similarity", "--config", "{toy}/run.conf", "--out", "{out}"]),
]


def write_toy() -> None:
    data = synthetic.generate({"BP": 40, "MF": 25, "CC": 25}, n_proteins=80, module_size=4, seed=11)
    data.new = AnnotationRelease.from_pairs("toy-new", data.dag, data.new.pairs() + _planted(data))
    os.makedirs(TOY, exist_ok=True)
    with open(os.path.join(TOY, "go.obo"), "w", encoding="utf-8", newline="\n") as fh:
        synthetic.write_obo(data, fh)
    for name, release, seed in (("old.gaf", data.old, 1), ("new.gaf", data.new, 2)):
        with open(os.path.join(TOY, name), "w", encoding="utf-8", newline="\n") as fh:
            synthetic.write_gaf(release, fh, seed)


def _planted(data: synthetic.SyntheticData) -> list[tuple[str, str]]:
    """Extra novel annotations so every category shows up: First, Anc and Desc."""
    dag, old = data.dag, data.old
    extra = [("P09000", dag.branch_terms("MF")[-1])]  # a protein absent from the old release
    for p in old.proteins:
        terms = sorted(old.direct_terms(p))
        deep = [t for t in terms if dag.level(t) >= 2]
        if deep:
            parent = sorted(dag.parents(deep[0]))[0]
            extra.append((p, parent))  # ancestor of an existing annotation
            break
    for p in reversed(old.proteins):
        inner = [t for t in sorted(old.direct_terms(p)) if dag.children(t)]
        if inner:
            extra.append((p, sorted(dag.children(inner[0]))[0]))  # descendant
            break
    return extra


def run_golden(outdir: str, threads: int = 1) -> None:
    for name, argv in GOLDEN_RUNS:
        args = [a.format(toy=TOY, out=os.path.join(outdir, name)) for a in argv]
        code = main(args + ["--threads", str(threads)], environ={})
        if code != 0:
            raise SystemExit(f"{name}: exit {code}")


if __name__ == "__main__":
    write_toy()
    shutil.rmtree(GOLDEN, ignore_errors=True)
    run_golden(GOLDEN)
    sys.exit(0)
