"""Smoke test for the pynoc3d extension.

Build and install first:
    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/pynoc3d-*.whl
"""

import pynoc3d as nc

G1 = """\
cores 4
edge 0 1 100 10
edge 0 2 70 7
edge 1 3 50 5
edge 2 3 20 2
"""


def main():
    assert abs(nc.bit_energy(6) - 4.682) < 1e-12
    assert abs(nc.bit_energy(1) - 1.017) < 1e-12
    assert nc.xyz_hops(3, 0, 26) == 6

    g = nc.TaskGraph.from_text(G1)
    assert len(g) == 4 and g.priority_order()[0] == 0
    assert nc.TaskGraph.from_text(g.to_text()).arcs == g.arcs

    m = nc.map_cores(g, 3, "ddmap")
    assert m[0] == 13 and len(set(m)) == 4
    r = nc.evaluate(g, m)
    assert r["total_energy"] > 0 and r["eta"] == 4

    rg = nc.TaskGraph.random(27, 40, seed=1)
    dyn = nc.evaluate(rg, nc.dynamic_schedule(rg))
    plan = nc.cluster_schedule(rg, mapper="ddmap")
    clu = nc.evaluate(rg, plan["mapping"])
    assert sorted(t for c in plan["clusters"] for t in c) == list(range(27))
    print(f"dynamic energy {dyn['total_energy']:.1f}, cluster energy {clu['total_energy']:.1f}")

    small = nc.TaskGraph.random(4, 6, seed=3)
    best, best_map = nc.exhaustive_oracle(small)
    res = nc.pso_optimize(small, mesh_n=2, max_evals=20_000, seed=3)
    assert res["fitness"] >= best
    assert all(b <= a for a, b in zip(res["trace"], res["trace"][1:]))
    print(f"oracle {best:.3f}, pso {res['fitness']:.3f}")

    try:
        nc.TaskGraph(2, [(0, 0, 1, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("self-loop accepted")
    print("smoke test ok")


if __name__ == "__main__":
    main()
