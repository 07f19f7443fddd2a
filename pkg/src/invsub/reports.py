"""Writing reports to disk, including the full acceptance bundle."""

from __future__ import annotations

import re
from pathlib import Path

from .catalog import FRECHET, PARETO, default_catalog, parse_spec
from .classifiers import classify_all, is_invsub, is_super_heavy_tailed
from .dominance import check_dominance_exact2, check_dominance_mc, mean_diagnostic
from .numerics import GridSpec, dumps
from .orders import leq_isb

__all__ = ["write_text", "slug", "acceptance_bundle", "DEFAULT_SEED"]

DEFAULT_SEED = 20240601

EXACT2_SPECS = ("pareto", "shifted-pareto", "frechet", "abs-cauchy", "exp:rate=1")
EXACT2_THETAS = (0.1, 0.3, 0.5)
MC_RUNS = (
    ("pareto", (0.5, 0.5)),
    ("shifted-pareto", (0.5, 0.5)),
    ("frechet", (0.3, 0.7)),
    ("abs-cauchy", (0.1, 0.9)),
    ("exp:rate=1", (0.5, 0.5)),
    ("ceil-geom:p=0.3", (0.4, 0.6)),
)
MEAN_SPECS = ("pareto", "frechet", "ceil-geom:p=0.3", "exp:rate=1")


def slug(text):
    return re.sub(r"[^A-Za-z0-9.]+", "_", text).strip("_")


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def acceptance_bundle(out_dir, seed=DEFAULT_SEED, workers=1, grid: GridSpec | None = None):
    """Run the acceptance computations and write one JSON file per result.

    Output is byte-identical for a fixed ``seed`` whatever ``workers`` is.
    Returns the list of written paths.
    """
    out = Path(out_dir)
    g = grid or GridSpec()
    written = []

    for d in default_catalog():
        report = classify_all(d, g, workers=workers)
        written.append(write_text(out / "classify" / f"{slug(d.spec)}.json", dumps(report)))

    rows = []
    for d in default_catalog():
        rows.append({
            "distribution": d.spec,
            "super_heavy_tailed": is_super_heavy_tailed(d, g).status,
            "isb_frechet": leq_isb(d, FRECHET, g, workers).status,
            "invsub": is_invsub(d, g).status,
            "isb_pareto": leq_isb(d, PARETO, g, workers).status,
        })
    bench = leq_isb(FRECHET, PARETO, g, workers)
    written.append(write_text(out / "orders" / "equivalence.json",
                              dumps({"rows": rows, "frechet_isb_pareto": bench.to_dict()})))

    for spec in EXACT2_SPECS:
        d = parse_spec(spec)
        for theta in EXACT2_THETAS:
            rep = check_dominance_exact2(d, theta)
            written.append(write_text(out / "dominance" / f"exact2_{slug(spec)}_{theta}.json", dumps(rep)))

    for spec, w in MC_RUNS:
        rep = check_dominance_mc(parse_spec(spec), w, n_samples=100_000, seed=seed, alpha=0.01,
                                 workers=workers)
        written.append(write_text(out / "dominance" / f"mc_{slug(spec)}.json", dumps(rep)))
        written.append(write_text(out / "dominance" / f"mc_{slug(spec)}.csv", rep.to_csv()))

    means = {spec: mean_diagnostic(parse_spec(spec)).to_dict() for spec in MEAN_SPECS}
    written.append(write_text(out / "mean_diagnostic.json", dumps(means)))
    return written
