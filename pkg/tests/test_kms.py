"""Equilibrium state constructions against the hand-worked examples."""

import dataclasses
import math

import numpy as np
import pytest

import graphkms as gk
from graphkms import kms, spectral

from conftest import example

LN2 = math.log(2)
LN3 = math.log(3)
GOLDEN = 1 + math.sqrt(5)


def crit(G, k):
    return gk.critical_temperatures(G)[k]


def test_beta_value_variants():
    G = example("pair_toward_small")
    assert gk.beta_value(G, 1.25) == 1.25
    assert gk.beta_value(G, gk.Numeric(0.5)) == 0.5
    assert gk.beta_value(G, gk.CriticalOf(0)) == pytest.approx(LN2, abs=1e-12)
    assert gk.beta_value(G, gk.CriticalOf(1)) == pytest.approx(LN3, abs=1e-12)


def test_beta_value_rejects_bad_input():
    G = example("pair_toward_small")
    with pytest.raises(ValueError):
        gk.beta_value(G, float("nan"))
    with pytest.raises(ValueError):
        gk.beta_value(G, gk.CriticalOf(99))
    H = example("two_sources_chain")
    with pytest.raises(ValueError):
        gk.beta_value(H, gk.CriticalOf(0))  # {u1} is trivial


def test_H_beta_ranges():
    G = example("pair_toward_small")
    assert gk.H_beta(G, 0.5).members == {"v", "w"}
    assert gk.H_beta(G, gk.CriticalOf(0)).members == {"w"}
    assert gk.H_beta(G, 0.9).members == {"w"}
    assert gk.H_beta(G, gk.CriticalOf(1)).members == set()
    assert gk.H_beta(G, 2.0).members == set()
    assert gk.H_beta(G, 0.5).hereditary


def test_K_beta_examples():
    G = example("pair_toward_small")
    assert gk.K_beta(G, gk.CriticalOf(1)).members == {"w"}
    assert gk.K_beta(G, gk.CriticalOf(0)).members == {"v", "w"}
    assert gk.K_beta(G, 2.0).members == set()
    G5 = example("reversed_tail")
    assert gk.K_beta(G5, gk.CriticalOf(1)).members == {"v", "u2", "w"}


def test_H_K_numeric_matches_critical_within_tol():
    G = example("pair_toward_small")
    assert gk.K_beta(G, LN3).members == gk.K_beta(G, gk.CriticalOf(1)).members
    assert gk.H_beta(G, LN3 + 5e-10).members == gk.H_beta(G, LN3).members


def test_minimal_critical_components():
    G = example("twin_minimal")
    mc = gk.minimal_critical_components(G)
    assert {c.members for c in mc} == {("v",), ("w",)}
    G2 = example("pair_toward_small")
    assert {c.members for c in gk.minimal_critical_components(G2)} == {("w",)}


def test_minimal_critical_rejects_acyclic():
    G = gk.parse_graph("vertices: a b\nedge a b\n")
    with pytest.raises(ValueError):
        gk.minimal_critical_components(G)


def test_critical_temperatures_examples():
    G1 = example("pair_toward_large")
    assert [gk.beta_value(G1, s) for s in gk.critical_temperatures(G1)] == [
        pytest.approx(LN3, abs=1e-12)
    ]
    G2 = example("pair_toward_small")
    assert [gk.beta_value(G2, s) for s in gk.critical_temperatures(G2)] == [
        pytest.approx(LN2, abs=1e-12),
        pytest.approx(LN3, abs=1e-12),
    ]
    G3 = example("golden_feeder")
    assert [gk.beta_value(G3, s) for s in gk.critical_temperatures(G3)] == [
        pytest.approx(LN2, abs=1e-12),
        pytest.approx(math.log(GOLDEN), abs=1e-9),
    ]
    G7 = example("twin_minimal")
    vals = [gk.beta_value(G7, s) for s in gk.critical_temperatures(G7)]
    assert vals == [pytest.approx(0.0, abs=1e-12), pytest.approx(LN2, abs=1e-12)]
    assert gk.critical_temperatures(gk.parse_graph("vertices: a\n")) == []


def test_critical_temperatures_dedupe_equal_values():
    # two incomparable components with the same radius give one temperature
    G = gk.parse_graph("vertices: a b\nedge a a 2\nedge b b 2\n")
    crits = gk.critical_temperatures(G)
    assert len(crits) == 1
    assert crits[0].component == 0


def test_z_vector_examples():
    G2 = example("pair_toward_small")
    z = gk.z_vector(G2, G2.components[1])
    assert set(z) == {"v"}
    assert z["v"] == pytest.approx(1.0, abs=1e-9)

    G1 = example("pair_toward_large")
    assert gk.z_vector(G1, G1.components[1]) == {}

    G3 = example("golden_feeder")
    z3 = gk.z_vector(G3, G3.components[1])
    assert z3["v"] == pytest.approx(0.5, abs=1e-9)


def test_z_vector_rejects_non_minimal_component():
    G = example("pair_toward_small")
    with pytest.raises(ValueError):
        gk.z_vector(G, G.components[0])


def test_psi_measure_examples():
    G2 = example("pair_toward_small")
    psi = gk.psi_C_measure(G2, G2.components[1])
    assert psi.m["v"] == pytest.approx(0.5, abs=1e-9)
    assert psi.m["w"] == pytest.approx(0.5, abs=1e-9)
    assert psi.state_type == "Infinite"
    assert psi.factors_through_graph_algebra
    assert psi.beta_value == pytest.approx(LN3, abs=1e-12)

    G1 = example("pair_toward_large")
    psi1 = gk.psi_C_measure(G1, G1.components[1])
    assert psi1.m == {"v": pytest.approx(0.0), "w": pytest.approx(1.0)}

    G3 = example("golden_feeder")
    psi3 = gk.psi_C_measure(G3, G3.components[1])
    expect = {
        "v": 1 / 3,
        "w": (math.sqrt(5) - 1) / 3,
        "u": (3 - math.sqrt(5)) / 3,
    }
    for v, val in expect.items():
        assert psi3.m[v] == pytest.approx(val, abs=1e-9)


def test_psi_measure_satisfies_eigen_identity():
    for name in ("pair_toward_small", "golden_feeder", "twin_minimal"):
        G = example(name)
        for C in gk.minimal_critical_components(G):
            psi = gk.psi_C_measure(G, C)
            m = np.array([psi.m[v] for v in G.vertices])
            rho = C.spectral_radius
            assert np.max(np.abs(G.matrix @ m - rho * m)) < 1e-9, name


def test_beta_v_examples():
    G2 = example("pair_toward_small")
    assert gk.beta_v(G2, "v") == pytest.approx(LN2, abs=1e-12)
    assert gk.beta_v(G2, "w") == pytest.approx(LN3, abs=1e-12)
    G6 = example("persistent_source")
    assert gk.beta_v(G6, "u3") is None
    assert gk.beta_v(G6, "u1") is None
    # paths from u2 enter the v-loop but can never reach the w-loop
    assert gk.beta_v(G6, "u2") == pytest.approx(LN2, abs=1e-12)
    assert gk.beta_v(G6, "w") == pytest.approx(LN3, abs=1e-12)
    G4 = example("two_sources_chain")
    assert gk.beta_v(G4, "u1") == pytest.approx(LN2, abs=1e-12)


def test_phi_measure_examples():
    G = example("pair_toward_small")
    mid = (LN2 + LN3) / 2
    phi = gk.phi_beta_v_measure(G, mid, "v")
    assert phi.m == {"v": pytest.approx(1.0), "w": pytest.approx(0.0)}
    assert phi.state_type == "Finite"

    phi_w = gk.phi_beta_v_measure(G, math.log(4), "w")
    assert phi_w.m["v"] == pytest.approx(1 / 3, abs=1e-9)
    assert phi_w.m["w"] == pytest.approx(2 / 3, abs=1e-9)


def test_phi_measure_requires_beta_above_beta_v():
    G = example("pair_toward_small")
    with pytest.raises(ValueError):
        gk.phi_beta_v_measure(G, 0.9, "w")
    with pytest.raises(ValueError):
        gk.phi_beta_v_measure(G, 0.5, "v")
    with pytest.raises(ValueError):
        gk.phi_beta_v_measure(G, 1.5, "zz")


def test_phi_measure_normalized_by_y():
    # m_w = R(w, v) / y_v over the survivors
    G = example("two_sources_chain")
    beta = 1.3
    phi = gk.phi_beta_v_measure(G, beta, "u2")
    y = gk.y_vector(G, beta)
    R = np.linalg.solve(
        np.eye(4) - math.exp(-beta) * G.matrix.astype(float), np.eye(4)
    )
    j = G.index["u2"]
    for v in G.vertices:
        assert phi.m[v] == pytest.approx(R[G.index[v], j] / y[j], abs=1e-9)


def test_phi_measure_agrees_across_hereditary_choices():
    # {u1, w} is hereditary and also valid for u2 at beta between ln2 and ln3,
    # so the measure must match the one built over the quotient by K_beta
    G = example("two_sources_chain")
    beta = 1.0
    phi = gk.phi_beta_v_measure(G, beta, "u2")
    keep = [G.index["v"], G.index["u2"]]
    M = G.matrix[np.ix_(keep, keep)]
    R = np.linalg.solve(np.eye(2) - math.exp(-beta) * M.astype(float), np.eye(2))
    col = R[:, 1] / R[:, 1].sum()
    assert phi.m["v"] == pytest.approx(col[0], abs=1e-9)
    assert phi.m["u2"] == pytest.approx(col[1], abs=1e-9)
    assert phi.m["u1"] == 0.0 and phi.m["w"] == 0.0


def test_general_state_measure_example():
    G = example("pair_toward_small")
    state = gk.general_state_measure(G, gk.CriticalOf(1), 0.5, {"v": 1 / 3}, {1: 1.0})
    assert state.m["v"] == pytest.approx(0.75, abs=1e-9)
    assert state.m["w"] == pytest.approx(0.25, abs=1e-9)
    assert state.state_type == "Mixed"
    assert isinstance(state.label, gk.Mixture)


def test_general_state_measure_reductions():
    G = example("pair_toward_small")
    psi = gk.psi_C_measure(G, G.components[1])
    r0 = gk.general_state_measure(G, gk.CriticalOf(1), 0.0, {"v": 1 / 3}, {1: 1.0})
    for v in G.vertices:
        assert r0.m[v] == pytest.approx(psi.m[v], abs=1e-12)
    assert r0.state_type == "Infinite"

    phi = gk.phi_beta_v_measure(G, gk.CriticalOf(1), "v")
    r1 = gk.general_state_measure(G, gk.CriticalOf(1), 1.0, {"v": 1 / 3}, {1: 1.0})
    for v in G.vertices:
        assert r1.m[v] == pytest.approx(phi.m[v], abs=1e-12)
    assert r1.state_type == "Finite"


def test_general_state_measure_accepts_component_keys():
    G = example("pair_toward_small")
    by_id = gk.general_state_measure(G, gk.CriticalOf(1), 0.25, {"v": 1 / 3}, {1: 1.0})
    by_comp = gk.general_state_measure(
        G, gk.CriticalOf(1), 0.25, {"v": 1 / 3}, {G.components[1]: 1.0}
    )
    assert by_id.m == by_comp.m


def test_general_state_measure_validation():
    G = example("pair_toward_small")
    spec = gk.CriticalOf(1)
    with pytest.raises(ValueError):
        gk.general_state_measure(G, spec, 0.5, {"v": 1.0}, {1: 1.0})  # eps.y != 1
    with pytest.raises(ValueError):
        gk.general_state_measure(G, spec, 0.5, {"v": 1 / 3}, {1: 0.7})
    with pytest.raises(ValueError):
        gk.general_state_measure(G, spec, 0.5, {"v": 1 / 3}, {0: 1.0})  # not mc
    with pytest.raises(ValueError):
        gk.general_state_measure(G, spec, 1.5, {"v": 1 / 3}, {1: 1.0})
    with pytest.raises(ValueError):
        gk.general_state_measure(G, spec, 0.5, {"w": 1.0}, {1: 1.0})  # inside K
    with pytest.raises(ValueError):
        gk.general_state_measure(G, 0.9, 0.5, {"v": 1 / 3}, {1: 1.0})  # not critical
    with pytest.raises(ValueError):
        gk.general_state_measure(G, spec, 0.5, {"v": -1 / 3}, {1: 1.0})


def test_general_state_measure_no_phi_part_left():
    # at ln2 every vertex lies inside K, so only r = 0 remains
    G = example("pair_toward_small")
    state = gk.general_state_measure(G, gk.CriticalOf(0), 0.0, {}, {0: 1.0})
    assert state.m == {"v": pytest.approx(1.0), "w": pytest.approx(0.0)}
    with pytest.raises(ValueError):
        gk.general_state_measure(G, gk.CriticalOf(0), 0.5, {}, {0: 1.0})


def test_general_state_measure_two_component_mixture():
    G = example("twin_minimal")
    comps = {c.members: c for c in gk.minimal_critical_components(G)}
    cv, cw = comps[("v",)], comps[("w",)]
    t = {cv.id: 0.5, cw.id: 0.5}
    y_u = float(gk.y_vector(gk.quotient_graph(G, gk.K_beta(G, gk.CriticalOf(1))), LN2)[0])
    state = gk.general_state_measure(G, gk.CriticalOf(1), 0.0, {"u": 1 / y_u}, t)
    psi_v = gk.psi_C_measure(G, cv)
    psi_w = gk.psi_C_measure(G, cw)
    for v in G.vertices:
        assert state.m[v] == pytest.approx(
            0.5 * psi_v.m[v] + 0.5 * psi_w.m[v], abs=1e-9
        )


def test_general_state_measure_mixture_factor_flag():
    G = example("persistent_source")
    spec = gk.CriticalOf(2)  # ln2, component {v}
    Q = gk.quotient_graph(G, gk.K_beta(G, spec))
    y = gk.y_vector(Q, LN2)
    eps_u3 = {"u3": 1 / float(y[Q.index["u3"]])}
    state = gk.general_state_measure(G, spec, 0.5, eps_u3, {2: 1.0})
    assert state.factors_through_graph_algebra
    eps_u1 = {"u1": 1 / float(y[Q.index["u1"]])}
    state2 = gk.general_state_measure(G, spec, 0.5, eps_u1, {2: 1.0})
    assert not state2.factors_through_graph_algebra


def test_simplex_pair_toward_large_regimes():
    G = example("pair_toward_large")
    assert gk.kms_simplex(G, 0.9).case == "Empty"
    sx = gk.kms_simplex(G, gk.CriticalOf(1))
    assert sx.case == "Critical"
    assert len(sx.extremes) == 1
    only = sx.extremes[0]
    assert only.m == {"v": pytest.approx(0.0), "w": pytest.approx(1.0)}
    assert only.factors_through_graph_algebra
    above = gk.kms_simplex(G, 1.4)
    assert above.case == "Subcritical"
    assert len(above.extremes) == 2
    assert not any(s.factors_through_graph_algebra for s in above.extremes)


def test_simplex_empty_descriptor_fields():
    G = example("pair_toward_small")
    sx = gk.kms_simplex(G, 0.2)
    assert sx.case == "Empty"
    assert sx.H_beta.members == {"v", "w"}
    assert sx.K_beta.members == {"v", "w"}
    assert sx.extremes == ()
    assert sx.beta_value == 0.2


def test_simplex_extreme_order_is_deterministic():
    G = example("twin_minimal")
    sx = gk.kms_simplex(G, gk.CriticalOf(1))
    labels = [type(s.label).__name__ for s in sx.extremes]
    assert labels == ["PsiC", "PsiC", "PhiBetaV"]
    assert sx.extremes[0].label.component.id < sx.extremes[1].label.component.id
    assert sx.extremes[2].label.vertex == "u"


def test_simplex_critical_cases_match_examples():
    G4 = example("two_sources_chain")
    counts = []
    for beta in (1.2, gk.CriticalOf(3), 0.9, gk.CriticalOf(1), 0.5):
        sx = gk.kms_simplex(G4, beta)
        counts.append(len(sx.extremes))
    assert counts == [4, 4, 3, 1, 0]


def test_simplex_subcritical_has_K_equal_H():
    G = example("golden_feeder")
    sx = gk.kms_simplex(G, 0.9)
    assert sx.case == "Subcritical"
    assert sx.H_beta.members == sx.K_beta.members == {"w", "u"}


def test_factors_recompute_matches_stored_flag():
    for name in ("pair_toward_small", "two_sources_chain", "reversed_tail",
                 "persistent_source", "twin_minimal"):
        G = example(name)
        for spec in gk.critical_temperatures(G):
            sx = gk.kms_simplex(G, spec)
            for s in sx.extremes:
                assert gk.factors_through_graph_algebra(G, s) == (
                    s.factors_through_graph_algebra
                ), (name, s.label)


def test_factors_source_flip_between_chains():
    G4 = example("two_sources_chain")
    sx4 = gk.kms_simplex(G4, gk.CriticalOf(3))
    flags4 = {
        s.label.vertex: s.factors_through_graph_algebra
        for s in sx4.extremes
        if isinstance(s.label, gk.PhiBetaV)
    }
    assert flags4 == {"u1": True, "v": False, "u2": False}

    G5 = example("reversed_tail")
    sx5 = gk.kms_simplex(G5, gk.CriticalOf(3))
    flags5 = {
        s.label.vertex: s.factors_through_graph_algebra
        for s in sx5.extremes
        if isinstance(s.label, gk.PhiBetaV)
    }
    assert flags5 == {"u1": False, "v": False, "u2": False}


def test_eval_state_examples():
    G = example("pair_toward_small")
    psi = gk.psi_C_measure(G, G.components[1])
    assert gk.eval_state(psi, "v", "v") == pytest.approx(0.5, abs=1e-12)
    assert gk.eval_state(psi, "v", "w") == 0.0
    loop = (("w", "w", 0),)
    assert gk.eval_state(psi, loop, loop) == pytest.approx(1 / 6, abs=1e-12)
    two = (("w", "w", 1), ("w", "w", 0))
    assert gk.eval_state(psi, two, two) == pytest.approx(1 / 18, abs=1e-12)
    hop = (("w", "v", 0),)
    assert gk.eval_state(psi, hop, hop) == pytest.approx(1 / 6, abs=1e-12)
    assert gk.eval_state(psi, loop, two) == 0.0


def test_eval_state_rejects_broken_paths():
    G = example("pair_toward_small")
    psi = gk.psi_C_measure(G, G.components[1])
    with pytest.raises(ValueError):
        gk.eval_state(psi, (("v", "v", 0), ("w", "w", 0)), (("v", "v", 0), ("w", "w", 0)))
    with pytest.raises(ValueError):
        gk.eval_state(psi, "zz", "zz")
    with pytest.raises(ValueError):
        gk.eval_state(psi, (), ())


def test_perron_check_examples():
    assert not gk.perron_check([1, -5, 5], (5 - math.sqrt(5)) / 2)
    assert gk.perron_check([1, -5, 5], (5 + math.sqrt(5)) / 2)
    assert gk.perron_check([1, -3], 3.0)


def test_perron_check_boundary_cases():
    # a dominant root below 1 is not Perron (x^2: double root at 0)
    assert not gk.perron_check([1, 0, 0], 0.0)
    with pytest.raises(ValueError):
        gk.perron_check([2, -1], 0.5)  # not monic
    with pytest.raises(ValueError):
        gk.perron_check([1, -2.5], 2.5)  # fractional coefficient
    with pytest.raises(ValueError):
        gk.perron_check([1], 1.0)  # degree zero
    with pytest.raises(ValueError):
        gk.perron_check([1, -5, 5], 2.0)  # no nearby root
    # x^2 - 1: roots 1 and -1 tie in modulus
    assert not gk.perron_check([1, 0, -1], 1.0)
    # x - 1: the integer 1 is Perron
    assert gk.perron_check([1, -1], 1.0)
    # x^2 - x - 1: golden mean dominates its conjugate
    assert gk.perron_check([1, -1, -1], (1 + math.sqrt(5)) / 2)


def test_state_type_accessor():
    G = example("pair_toward_small")
    psi = gk.psi_C_measure(G, G.components[1])
    assert gk.state_type(psi) == "Infinite"
    phi = gk.phi_beta_v_measure(G, 2.0, "w")
    assert gk.state_type(phi) == "Finite"


def test_state_measure_is_frozen():
    G = example("pair_toward_small")
    psi = gk.psi_C_measure(G, G.components[1])
    with pytest.raises(dataclasses.FrozenInstanceError):
        psi.beta_value = 0.0
