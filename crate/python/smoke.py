#!/usr/bin/env python3
"""Smoke test for the logmap_py extension module.

Builds nothing itself: expects the cdylib under target/release or
target/debug (cargo build -p logmap-py). Copies it to a temp dir under the
importable name and runs a few end-to-end checks.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "liblogmap_py.so",
        ROOT / "target" / "debug" / "liblogmap_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("liblogmap_py.so not found; run: cargo build -p logmap-py")
    tmp = tempfile.mkdtemp(prefix="logmap_py_")
    target = pathlib.Path(tmp) / "logmap_py.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("logmap_py", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


CHAIN = """
{
  "vertices": [
    {"id": "v1", "nondegenerate": true},
    {"id": "v2", "nondegenerate": false}
  ],
  "edges": [
    {"id": "l", "ends": ["v1", "v2"], "contact_order": 1, "orientation": "v1->v2"}
  ],
  "legs": []
}
"""

CYCLE = """
{
  "vertices": [
    {"id": "a", "nondegenerate": false},
    {"id": "b", "nondegenerate": false}
  ],
  "edges": [
    {"id": "e1", "ends": ["a", "b"], "contact_order": 1, "orientation": "a->b"},
    {"id": "e2", "ends": ["a", "b"], "contact_order": 1, "orientation": "b->a"}
  ],
  "legs": []
}
"""

DUAL = """
{
  "vertices": [
    {"id": "v1", "nondegenerate": true, "multidegree": -2},
    {"id": "v2", "nondegenerate": false, "multidegree": -1}
  ],
  "edges": [{"id": "l", "ends": ["v1", "v2"]}],
  "legs": [{"id": "p", "vertex": "v2", "contact_order": 3}]
}
"""


def main():
    lm = load_module()

    g = lm.MarkedGraph.from_json(CHAIN)
    assert g.validate() == []
    assert g.is_admissible()
    assert not g.has_strict_cycle()
    am = g.associated_monoid()
    assert am.rank == 1
    assert am.torsion == []
    assert am.generator_image("v:v1") == [0]
    assert am.generator_image("l:l") == [1]
    assert am.monoid().hilbert_basis() == [[1]]
    print("ok: chain graph monoid")

    cyc = lm.MarkedGraph.from_json(CYCLE)
    assert cyc.has_strict_cycle()
    assert not cyc.is_admissible()
    assert cyc.admissibility_failure() == "NotSharp"
    print("ok: strict cycle rejected")

    two = lm.MarkedGraph.from_json(CHAIN.replace('"nondegenerate": true', '"nondegenerate": false'))
    g2, q = two.specialize(contract=["l"])
    am_src, am_dst = two.associated_monoid(), g2.associated_monoid()
    assert "v1" in g2.to_json()
    assert q.apply(am_src.generator_image("l:l")) == [0] * am_dst.rank
    assert q.apply(am_src.generator_image("v:v1")) == am_dst.generator_image("v:v1")
    print("ok: specialization")

    sols, complete = lm.enumerate_decorations(DUAL)
    assert complete and len(sols) == 1
    assert '"contact_order": 2' in sols[0].to_json()
    print("ok: enumeration")

    m = lm.AffineMonoid.from_generators(1, [[2], [3]])
    assert not m.is_saturated()
    assert m.saturate().hilbert_basis() == [[1]]
    cert = m.contains([7])
    assert cert is not None and sum(c * g[0] for c, g in zip(cert, m.generators())) == 7
    assert m.contains([1]) is None
    n, cert = m.multiple_in_unsaturated([1])
    assert n == 2 and sum(c * g[0] for c, g in zip(cert, m.generators())) == 2
    print("ok: numerical monoid")

    quad = lm.AffineMonoid.from_generators(2, [[1, 0], [0, 1]])
    face, proj = quad.face_quotient([[1, 0]])
    assert face.rank == 1
    assert proj.apply([1, 0]) == [0] and proj.apply([0, 1]) != [0]
    print("ok: face quotient")

    u, d, v = lm.smith([[2, 4], [6, 8]])
    assert d[0][0] == 2 and d[1][1] == 4 and d[0][1] == 0 and d[1][0] == 0
    # u @ a @ v == d over plain Python ints
    a = [[2, 4], [6, 8]]
    ua = [[sum(u[i][k] * a[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    uav = [[sum(ua[i][k] * v[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert uav == d
    print("ok: smith normal form")

    big = 10**30
    mb = lm.AffineMonoid.from_generators(1, [[big]])
    assert mb.hilbert_basis() == [[big]]
    assert mb.contains([3 * big]) == [3]
    assert mb.contains([big + 1]) is None
    sat = mb.saturate()  # every lattice point of the ray: some multiple lands in mb
    assert sat.hilbert_basis() == [[1]]
    assert sat.contains([big]) == [big]
    print("ok: big integers cross the boundary")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
