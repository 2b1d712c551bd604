"""Smoke test for the qroute_py extension module."""

from pathlib import Path

import qroute_py as qr

ROOT = Path(__file__).resolve().parent.parent
CMT01 = ROOT / "crates" / "core" / "tests" / "data" / "CMT01.xml"


def main():
    q = qr.Qubo(2, [-1.0, -1.0], {(0, 1): 2.0})
    best = q.anneal(num_reads=20, sweeps=100, seed=1)[0]
    assert best[1] == -1.0, best
    assert q.energy([True, True]) == 0.0
    assert q.tabu(iters=50, seed=3)[0][1] == -1.0

    census = qr.variable_census(5, 2, 10)
    assert census == {"decision": 98, "capacity_slack": 18, "subtour_slack": 49, "total": 165}, census

    inst = qr.Instance.load(str(CMT01))
    assert (inst.num_customers, inst.num_vehicles, inst.capacity) == (50, 5, 160)

    labels, iters, _ = qr.kmedoids(inst)
    assert len(set(labels)) == 5 and iters <= 10
    assert qr.silhouette(inst, labels) > 0.3

    paths = qr.route(inst, labels)
    arcs = [list(zip(p, p[1:])) for p in paths]
    report, gls_distance = qr.check(inst, arcs)
    assert report["total"] == 0, report

    run = qr.solve(inst, "hybrid-kmedoids-gls", seed=0)
    assert run["violations"]["total"] == 0
    assert run["distance"] <= 551.0, run["distance"]

    toy = qr.Instance("toy", (0.0, 0.0), [(1.0, 0.0), (0.0, 1.0)], [1, 1], 1, 2)
    report, distance = qr.check(toy, [[(0, 1), (1, 3)], [(0, 2), (2, 3)]], open=True)
    assert report["total"] == 0 and distance == 4.0

    try:
        qr.Instance.load("missing.xml")
    except OSError:
        pass
    else:
        raise AssertionError("missing file loaded")

    print(f"ok: CMT01 distance {run['distance']:.2f}, kmedoids+gls {gls_distance:.2f}")


if __name__ == "__main__":
    main()
