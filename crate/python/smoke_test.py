"""Smoke test for the archspread Python module.

Build and install the extension first, e.g.

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import json
import math

import archspread as a


def close(x, y, tol=1e-12):
    return abs(x - y) <= tol


def main():
    clone = a.Step("clone", ["Rebook"])
    move = a.Step("move", ["Exporter", "N2"])
    assert a.step_distance(clone, clone) == 0.0
    assert a.step_distance(clone, move) == 1.0
    assert a.step_distance(clone, None) == 1.0
    assert close(a.sequence_distance([clone], [clone, move]), 1.0)

    tight = a.SolutionSet("tight", ["rt"], [
        a.Solution("a", [1.0], [clone]),
        a.Solution("b", [2.0], [clone]),
    ])
    wide = a.SolutionSet("wide", ["rt"], [
        a.Solution("c", [0.0], [clone]),
        a.Solution("d", [5.0], [move]),
    ])
    assert tight.validate() == []
    assert a.max_spread(wide) == 5.0

    dm = a.distance_matrix(wide)
    assert len(dm) == 2 and dm[0, 1] == 1.0
    assert a.max_architectural_spread(dm) == 1.0
    assert a.max_architectural_spread(dm, max_d=2.0) == 0.5

    raw = a.DistanceMatrix(["x", "y", "z"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]], 4.0)
    assert close(a.max_architectural_spread(raw), math.sqrt(9 / 48))
    try:
        a.DistanceMatrix(["x", "y"], [[0, 1], [2, 0]], 4.0)
    except a.ArchspreadError:
        pass
    else:
        raise AssertionError("asymmetric matrix accepted")

    square = a.DistanceMatrix(
        ["p", "q", "r", "s"],
        [[0, 1, math.sqrt(2), 1], [1, 0, 1, math.sqrt(2)],
         [math.sqrt(2), 1, 0, 1], [1, math.sqrt(2), 1, 0]],
        2.0,
    )
    p = a.mds_project(square)
    assert p.stress < 1e-9 and p.eigenvalue_share > 0.999

    results = a.indicators([tight, wide, a.SolutionSet("mid", ["rt"], [
        a.Solution("e", [0.0], [clone]),
        a.Solution("f", [3.0], [a.Step("clone", ["Exporter"])]),
    ])])
    corr = a.spread_correlation(results)
    assert corr["n"] == 3 and close(corr["spearman"], 1.0)

    bundle = a.Bundle.synth(7, 3, 12)
    again = a.Bundle.from_json(bundle.to_json())
    assert again.to_json() == bundle.to_json()
    analysis = bundle.analyze(w_pred=0.4)
    assert all(0.0 <= r.mas <= 1.0 for r in analysis.results)
    report = json.loads(analysis.report())
    assert [s["label"] for s in report["sets"]] == ["set-0", "set-1", "set-2"]
    summary, points = analysis.report("csv")
    assert summary.startswith("label,n,o,ms,mas,max_d,L_pad")
    assert len(points.splitlines()) == 1 + 36
    assert analysis.svg().startswith("<svg")

    print("archspread smoke test passed:",
          ", ".join(f"{r.set_label} MAS={r.mas:.3f}" for r in analysis.results))


if __name__ == "__main__":
    main()
