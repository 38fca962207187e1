"""Descent simulator tests.

Expected levels and cocycles for the crafted scenario files were
computed by hand from the tree geometry: the center of a vertex pair at
distance d is the middle vertex (d even) or the middle edge (d odd) of
the geodesic, and a group element picks up a prime in its twist exactly
when it reverses that center edge or flips that ramified sign.
"""

import json
import random
from pathlib import Path

import pytest

from qmtree import descent as dd
from qmtree import tree as bt
from qmtree.errors import (
    InconsistencyError,
    PreconditionError,
    ResourceError,
    ValidationError,
)

DATA = Path(__file__).parent / "data"


def scenario(name):
    return dd.load_scenario(DATA / name)


# file -> (N, full cocycle table, minimality flag)
EXPECTED = {
    "trivial.json": (1, {}, True),
    "swap5.json": (5, {"s": [5]}, True),
    "star5.json": (
        1,
        {"s": [], "ss": [], "sss": [], "ssss": [], "sssss": []},
        True,
    ),
    "bitflip2.json": (1, {"s": [2]}, True),
    "bitflip23.json": (1, {"s": [2, 3]}, True),
    "composite_5_7_2.json": (5, {"s": [2, 5]}, True),
    "swap5_bit2.json": (5, {"s": [2, 5]}, True),
    "twogen_15.json": (15, {"s": [5], "t": [3], "st": [3, 5]}, True),
    "path2_swap2.json": (1, {"s": []}, True),
    "path3_swap2.json": (2, {"s": [2]}, True),
    "path2_swap3.json": (1, {"s": []}, True),
    "cycle3_at2.json": (1, {"s": [], "ss": []}, True),
    "doubleswap_35.json": (35, {"s": [5, 7]}, True),
    "twogen_35.json": (35, {"s": [5], "t": [7], "st": [5, 7]}, True),
    "deep_pair2.json": (2, {"s": [2]}, True),
    # the generator acts trivially, so the acting group is {e} and the
    # cocycle table is empty; the edge center still forces N = 2 and
    # the fixed vertices defeat minimality
    "fixed_pair2.json": (2, {}, False),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_crafted_scenarios(name):
    N, cocycle, minimal = EXPECTED[name]
    report = dd.run_descent(scenario(name))
    assert report["N"] == N
    assert report["cocycle"] == cocycle
    assert report["checks"]["homomorphism"] is True
    assert report["checks"]["phiTildeInjective"] is True
    assert report["checks"]["minimality"] is minimal


def test_swap_point_orientation():
    report = dd.run_descent(scenario("swap5.json"))
    assert report["point"]["edges"] == {
        "5": {"origin": "5:[[1,0],[0,1]]", "terminus": "5:[[1,0],[0,5]]"}
    }
    assert report["point"]["level"] == 5
    assert report["centers"]["5"]["kind"] == "edge"


def test_textual_origin_rule_differs_from_numeric_order():
    # "2:[[1,0],[0,16]]" < "2:[[1,0],[0,8]]" as strings, so the deeper
    # vertex becomes the origin even though its key is numerically larger
    report = dd.run_descent(scenario("deep_pair2.json"))
    assert report["point"]["edges"]["2"] == {
        "origin": "2:[[1,0],[0,16]]",
        "terminus": "2:[[1,0],[0,8]]",
    }


def test_path3_center_is_middle_edge():
    report = dd.run_descent(scenario("path3_swap2.json"))
    assert report["centers"]["2"]["vertices"] == [
        "2:[[1,0],[0,2]]",
        "2:[[1,0],[0,4]]",
    ]
    assert report["point"]["edges"]["2"]["origin"] == "2:[[1,0],[0,2]]"


def test_vertex_components_pass_through():
    report = dd.run_descent(scenario("composite_5_7_2.json"))
    assert report["point"]["vertices"] == {"7": "7:[[1,0],[0,7]]"}
    assert report["point"]["ramified"] == {"2": "+", "3": "+"}
    report = dd.run_descent(scenario("star5.json"))
    assert report["point"]["vertices"] == {"5": "5:[[1,0],[0,1]]"}
    assert report["point"]["edges"] == {}


def test_fixed_pair_minimality_witnesses():
    s = scenario("fixed_pair2.json")
    result = dd.verify_minimality(s)
    assert result["ok"] is False
    assert result["perPrime"]["2"]["fixedVertices"] == [
        "2:[[1,0],[0,1]]",
        "2:[[1,0],[0,2]]",
    ]
    assert not dd.checks_pass(dd.run_descent(s))


def test_report_deterministic():
    for name in ("swap5.json", "composite_5_7_2.json", "twogen_15.json"):
        a = dd.report_to_json(dd.run_descent(scenario(name)))
        b = dd.report_to_json(dd.run_descent(scenario(name)))
        assert a == b
        assert json.loads(a)  # well-formed


def test_level_independent_of_listing_order():
    with open(DATA / "twogen_15.json", encoding="utf-8") as fh:
        obj = json.load(fh)
    base = dd.run_descent(dd.scenario_from_json(obj))
    flipped = json.loads(json.dumps(obj))
    for ell in flipped["local"]:
        comp = flipped["local"][ell]
        comp["vertices"] = comp["vertices"][::-1]
        comp["action"] = {g: imgs[::-1] for g, imgs in comp["action"].items()}
    flipped["generators"] = flipped["generators"][::-1]
    other = dd.run_descent(dd.scenario_from_json(flipped))
    assert other["N"] == base["N"]
    assert other["centers"] == base["centers"]
    assert other["point"] == base["point"]


# ------------------------------------------------------------- twists


def _base_point(name="swap5_bit2.json"):
    s = scenario(name)
    _, centers = dd.compute_level(s)
    return s, dd.choose_point(s, centers)


def test_atkin_lehner_identity_and_involution():
    _, Q = _base_point()
    assert dd.atkin_lehner(Q, 1) == Q
    assert dd.atkin_lehner(Q, set()) == Q
    for n in (5, 2, 10, {2, 5}, {3}):
        assert dd.atkin_lehner(dd.atkin_lehner(Q, n), n) == Q


def test_atkin_lehner_symmetric_difference():
    _, Q = _base_point()
    m, n = {5}, {2, 5}
    lhs = dd.atkin_lehner(dd.atkin_lehner(Q, n), m)
    assert lhs == dd.atkin_lehner(Q, {2})
    assert dd.atkin_lehner(Q, 30) == dd.atkin_lehner(
        dd.atkin_lehner(Q, 6), {5}
    )


def test_atkin_lehner_rejects_foreign_and_squareful():
    _, Q = _base_point()
    with pytest.raises(PreconditionError):
        dd.atkin_lehner(Q, {7})
    with pytest.raises(PreconditionError):
        dd.atkin_lehner(Q, 4)
    with pytest.raises(PreconditionError):
        dd.atkin_lehner(Q, 0)


def test_galois_apply_identity_and_swap():
    s, Q = _base_point()
    assert dd.galois_apply(s, "", Q) == Q
    sQ = dd.galois_apply(s, "s", Q)
    assert sQ == dd.atkin_lehner(Q, {2, 5})
    assert dd.galois_apply(s, "ss", Q) == Q
    assert dd.galois_twist(s, "s", Q) == frozenset({2, 5})
    assert dd.galois_twist(s, "", Q) == frozenset()


def test_phi_collapses_edges_to_origins():
    s, Q = _base_point("swap5.json")
    p = dd.phi(Q)
    assert p.level == 1 and p.edges == ()
    assert p.vertex_map[5] == bt.root(5)
    # reversing first moves the collapse to the terminus
    w = dd.phi(dd.atkin_lehner(Q, 5))
    assert w.vertex_map[5] == bt.parse_vertex("5:[[1,0],[0,5]]")
    a, b = dd.phi_tilde(Q)
    assert (a.vertex_map[5], b.vertex_map[5]) == (
        bt.root(5),
        bt.parse_vertex("5:[[1,0],[0,5]]"),
    )


def test_phi_compatibility():
    s, Q = _base_point("twogen_35.json")
    primes = [5, 7]
    for n in ([], [5], [7], [5, 7]):
        p0, pn = dd.phi(Q), dd.phi(dd.atkin_lehner(Q, set(n)))
        for ell in primes:
            moved = p0.vertex_map[ell] != pn.vertex_map[ell]
            assert moved == (ell in n)


def test_phi_tilde_injective_across_assignments():
    for name in ("swap5.json", "doubleswap_35.json", "twogen_35.json"):
        _, Q = _base_point(name)
        assert dd.check_phi_tilde_injective(Q)


# ------------------------------------------------------------- group


def test_words_parse_and_labels():
    s = scenario("twogen_15.json")
    assert dd.parse_word(s, "st") == ("s", "t")
    assert dd.parse_word(s, "s*t") == ("s", "t")
    assert dd.parse_word(s, ["t", "s"]) == ("t", "s")
    assert dd.parse_word(s, "") == ()
    with pytest.raises(PreconditionError):
        dd.parse_word(s, "sx")
    with pytest.raises(PreconditionError):
        dd.parse_word(s, ["q"])


def test_multichar_generator_names():
    obj = {
        "D": 1,
        "generators": ["sig", "tau"],
        "local": {
            "5": {
                "vertices": ["5:[[1,0],[0,1]]", "5:[[1,0],[0,5]]"],
                "action": {
                    "sig": ["5:[[1,0],[0,5]]", "5:[[1,0],[0,1]]"],
                    "tau": ["5:[[1,0],[0,1]]", "5:[[1,0],[0,5]]"],
                },
            },
            "3": {
                "vertices": ["3:[[1,0],[0,1]]", "3:[[1,0],[0,3]]"],
                "action": {
                    "sig": ["3:[[1,0],[0,1]]", "3:[[1,0],[0,3]]"],
                    "tau": ["3:[[1,0],[0,3]]", "3:[[1,0],[0,1]]"],
                },
            },
        },
    }
    s = dd.scenario_from_json(obj)
    assert dd.parse_word(s, "sigtau") == ("sig", "tau")
    report = dd.run_descent(s)
    assert report["cocycle"] == {
        "sig": [5],
        "tau": [3],
        "sig*tau": [3, 5],
    }


def test_trivially_acting_generator_collapses():
    # identity action everywhere: the acting group is trivial even
    # though a generator is named
    s = scenario("fixed_pair2.json")
    words = dd.group_elements(s)
    assert list(words) == [()]


def test_group_closure_guard():
    # a transposition and a 6-cycle on the root's neighbours generate
    # S6, which exceeds the closure bound
    nbs = [bt.format_vertex(v) for v in bt.neighbors(bt.root(5))]
    cyc = nbs[1:] + nbs[:1]
    swp = [nbs[1], nbs[0]] + nbs[2:]
    obj = {
        "D": 1,
        "generators": ["c", "t"],
        "local": {
            "5": {
                "vertices": nbs,
                "action": {"c": cyc, "t": swp},
            }
        },
    }
    with pytest.raises(ResourceError):
        dd.run_descent(dd.scenario_from_json(obj))


def test_apply_rejects_foreign_components():
    s = scenario("star5.json")
    n1 = bt.parse_vertex("5:[[1,0],[0,5]]")
    Q = dd.AdelicPoint.build({5: dd.OrientedEdge(bt.root(5), n1)}, {}, {})
    # the rotation moves this edge off itself
    with pytest.raises(InconsistencyError):
        dd.galois_apply(s, "s", Q)
    s2 = scenario("swap5.json")
    outside = dd.AdelicPoint.build(
        {}, {5: bt.parse_vertex("5:[[1,1],[0,5]]")}, {}
    )
    with pytest.raises(PreconditionError):
        dd.galois_apply(s2, "s", outside)
    foreign = dd.AdelicPoint.build(
        {}, {11: bt.root(11)}, {}
    )
    with pytest.raises(PreconditionError):
        dd.galois_apply(s2, "s", foreign)


# ------------------------------------------------------------- validation


BAD_SCENARIOS = [
    ({"D": 4, "generators": []}, "squarefree"),
    ({"D": 2, "generators": []}, "even number"),
    ({"D": "6", "generators": []}, "positive integer"),
    ({"D": 1, "generators": ["9x"]}, "bad name"),
    ({"D": 1, "generators": ["s", "s"]}, "duplicate"),
    ({"D": 1, "generators": [], "extra": 1}, "unknown field"),
    ({"D": 1, "generators": [], "local": {"4": {"vertices": []}}}, "not prime"),
    (
        {"D": 6, "generators": [], "ramified": {"2": {}, "3": {}},
         "local": {"2": {"vertices": ["2:[[1,0],[0,1]]"], "action": {}}}},
        "divides D",
    ),
    ({"D": 1, "generators": [], "local": {"5": {"vertices": []}}},
     "nonempty"),
    ({"D": 1, "generators": [],
      "local": {"5": {"vertices": ["5:[[3,0],[0,1]]"]}}}, "bad literal"),
    ({"D": 1, "generators": [],
      "local": {"5": {"vertices": ["3:[[1,0],[0,3]]"]}}}, "not a vertex at 5"),
    ({"D": 1, "generators": [],
      "local": {"5": {"vertices": ["5:[[1,0],[0,1]]", "5:[[1,0],[0,1]]"]}}},
     "duplicate vertices"),
    ({"D": 1, "generators": ["s"],
      "local": {"5": {"vertices": ["5:[[1,0],[0,1]]"], "action": {}}}},
     "missing generator"),
    ({"D": 1, "generators": [],
      "local": {"5": {"vertices": ["5:[[1,0],[0,1]]"],
                      "action": {"s": ["5:[[1,0],[0,1]]"]}}}},
     "unknown generator"),
    ({"D": 1, "generators": ["s"],
      "local": {"5": {"vertices": ["5:[[1,0],[0,1]]", "5:[[1,0],[0,5]]"],
                      "action": {"s": ["5:[[1,0],[0,1]]",
                                        "5:[[1,0],[0,1]]"]}}}},
     "not a permutation"),
    ({"D": 1, "generators": ["s"],
      "local": {"5": {"vertices": ["5:[[1,0],[0,1]]", "5:[[1,0],[0,5]]"],
                      "action": {"s": ["5:[[1,1],[0,5]]",
                                        "5:[[1,0],[0,1]]"]}}}},
     "not a listed vertex"),
    ({"D": 6, "generators": ["s"], "ramified": {"2": {"s": "flip"}}},
     "missing prime 3"),
    ({"D": 6, "generators": ["s"],
      "ramified": {"2": {"s": "flip"}, "3": {"s": "fix"},
                   "5": {"s": "fix"}}},
     "does not divide D"),
    ({"D": 6, "generators": ["s"],
      "ramified": {"2": {"s": "swap"}, "3": {"s": "fix"}}},
     "\"flip\" or \"fix\""),
    ({"D": 1, "generators": [], "relationsChecked": "yes"}, "boolean"),
]


@pytest.mark.parametrize("obj,needle", BAD_SCENARIOS)
def test_scenario_validation(obj, needle):
    with pytest.raises(ValidationError) as err:
        dd.scenario_from_json(obj)
    assert needle in str(err.value)


def test_non_isometric_action_rejected():
    # root->n1, n1->root, n2 fixed: d(root,n2)=1 but d(n1,n2)=2
    obj = {
        "D": 1,
        "generators": ["s"],
        "local": {
            "2": {
                "vertices": [
                    "2:[[1,0],[0,1]]",
                    "2:[[1,0],[0,2]]",
                    "2:[[1,1],[0,2]]",
                ],
                "action": {
                    "s": [
                        "2:[[1,0],[0,2]]",
                        "2:[[1,0],[0,1]]",
                        "2:[[1,1],[0,2]]",
                    ]
                },
            }
        },
    }
    with pytest.raises(ValidationError) as err:
        dd.scenario_from_json(obj)
    assert "not distance-preserving" in str(err.value)


def test_validation_collects_multiple_violations():
    obj = {"D": 4, "generators": ["s", "s"], "relationsChecked": 3}
    with pytest.raises(ValidationError) as err:
        dd.scenario_from_json(obj)
    msg = str(err.value)
    assert "squarefree" in msg and "duplicate" in msg and "boolean" in msg


# ------------------------------------------------------------- sweep


def _random_walk(rng, ell, start, steps):
    prev = None
    v = start
    for _ in range(steps):
        options = [w for w in bt.neighbors(v) if w != prev]
        prev, v = v, rng.choice(options)
    return v


def _random_component(rng, ell, gens):
    """One of: fixed singleton, pair swap along a geodesic, or a
    rotation of the root's neighbours.  All are isometric."""
    kind = rng.randrange(3)
    r = bt.root(ell)
    if kind == 0:
        verts = [r]
        perms = {g: [0] for g in gens}
    elif kind == 1:
        x = _random_walk(rng, ell, r, rng.randrange(2))
        y = _random_walk(rng, ell, x, 1 + rng.randrange(3))
        verts = [x, y]
        perms = {g: ([1, 0] if rng.randrange(2) else [0, 1]) for g in gens}
        if all(p == [0, 1] for p in perms.values()) and gens:
            perms[gens[0]] = [1, 0]  # keep at least one swap
    else:
        nbs = list(bt.neighbors(r))
        verts = [r] + nbs
        perms = {}
        for g in gens:
            k = rng.randrange(len(nbs))
            rot = nbs[k:] + nbs[:k]
            perms[g] = [0] + [1 + nbs.index(w) for w in rot]
    return {
        "vertices": [bt.format_vertex(v) for v in verts],
        "action": {
            g: [bt.format_vertex(verts[i]) for i in perm]
            for g, perm in perms.items()
        },
    }


def test_random_valid_scenarios_satisfy_all_checks():
    rng = random.Random("descent-sweep")
    for trial in range(12):
        gens = ["s", "t"][: 1 + rng.randrange(2)]
        D = rng.choice([1, 6, 10])
        obj = {
            "D": D,
            "generators": gens,
            "local": {
                str(ell): _random_component(rng, ell, gens)
                for ell in rng.sample([2, 3, 5, 7], 1 + rng.randrange(2))
                if D % ell != 0
            },
            "ramified": {
                str(p): {g: rng.choice(["flip", "fix"]) for g in gens}
                for p in ([2, 3] if D == 6 else [2, 5] if D == 10 else [])
            },
        }
        s = dd.scenario_from_json(obj)
        report = dd.run_descent(s)
        assert report["checks"]["homomorphism"], obj
        assert report["checks"]["phiTildeInjective"], obj
        assert report["checks"]["minimality"], obj
        for ell_str, twist in report["cocycle"].items():
            for p in twist:
                assert report["N"] * D % p == 0
