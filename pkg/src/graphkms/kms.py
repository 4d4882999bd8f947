"""KMS equilibrium simplices for the gauge action on graph Toeplitz algebras.

Every KMS state at inverse temperature beta is determined by its vertex
measure m, a probability vector with A m <= e^beta m.  This module builds the
extreme points of the simplex for any beta: psi-type states attached to
minimal critical components and phi-type states attached to vertices outside
K_beta, plus their convex mixtures, together with the factor-through and
finite/infinite type classification.

Float policy: comparisons against critical values use the tolerance TOL;
``CriticalOf`` carries a component id so critical temperatures can be used
without re-deriving them from floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .graph import Component, DirectedGraph, VertexSet, saturation

TOL = 1e-9

EMPTY = "Empty"
SUBCRITICAL = "Subcritical"
CRITICAL = "Critical"

FINITE = "Finite"
INFINITE = "Infinite"
MIXED = "Mixed"


# -- beta specifications -------------------------------------------------------


@dataclass(frozen=True)
class Numeric:
    value: float


@dataclass(frozen=True)
class CriticalOf:
    """beta = ln rho(A_C) for the component with this id, held exactly."""

    component: int


BetaSpec = Numeric | CriticalOf


def _as_beta(beta) -> BetaSpec:
    if isinstance(beta, (Numeric, CriticalOf)):
        return beta
    if isinstance(beta, (int, float)):
        return Numeric(float(beta))
    raise TypeError(f"not a beta specification: {beta!r}")


def beta_value(G: DirectedGraph, beta) -> float:
    """Resolve a BetaSpec to its float value."""
    spec = _as_beta(beta)
    if isinstance(spec, Numeric):
        if not math.isfinite(spec.value):
            raise ValueError("numeric beta must be finite")
        return spec.value
    comps = G.components
    if not 0 <= spec.component < len(comps):
        raise ValueError(f"no component with id {spec.component}")
    comp = comps[spec.component]
    if comp.trivial:
        raise ValueError("CriticalOf needs a nontrivial component")
    return math.log(comp.spectral_radius)


# -- state labels and containers -----------------------------------------------


@dataclass(frozen=True, eq=False)
class PsiC:
    component: Component


@dataclass(frozen=True, eq=False)
class PhiBetaV:
    vertex: str


@dataclass(frozen=True, eq=False)
class Mixture:
    r: float
    epsilon: dict[str, float]
    t: dict[int, float]


@dataclass(frozen=True, eq=False)
class StateMeasure:
    beta: BetaSpec
    beta_value: float
    m: dict[str, float]
    label: PsiC | PhiBetaV | Mixture
    factors_through_graph_algebra: bool
    state_type: str


@dataclass(frozen=True, eq=False)
class SimplexDescriptor:
    beta: BetaSpec
    beta_value: float
    case: str
    H_beta: VertexSet
    K_beta: VertexSet
    extremes: tuple[StateMeasure, ...]


# -- component-level classification ---------------------------------------------


def _classify(G: DirectedGraph, beta):
    """Sign of ln rho(A_C) - beta per nontrivial component id.

    +1 above the window, 0 inside it, -1 below.  CriticalOf resolves to the
    defining component's own ln rho, so that component always lands on 0.
    """
    spec = _as_beta(beta)
    bval = beta_value(G, spec)
    signs: dict[int, int] = {}
    for c in G.components:
        if c.trivial:
            continue
        ln = math.log(c.spectral_radius)
        if ln > bval + TOL:
            signs[c.id] = 1
        elif ln >= bval - TOL:
            signs[c.id] = 0
        else:
            signs[c.id] = -1
    return spec, bval, signs


def _closure_ids(G: DirectedGraph, ids) -> frozenset[int]:
    out: set[int] = set()
    for i in ids:
        out |= G.reachable_components(i)
    return frozenset(out)


def _members_of_ids(G: DirectedGraph, ids) -> list[str]:
    comps = G.components
    out = []
    for i in sorted(ids):
        out.extend(comps[i].members)
    return out


def H_beta(G: DirectedGraph, beta) -> VertexSet:
    """Hereditary closure of the components with ln rho(A_C) > beta."""
    _, _, signs = _classify(G, beta)
    ids = _closure_ids(G, (i for i, s in signs.items() if s > 0))
    return G.vertex_set(_members_of_ids(G, ids))


def K_beta(G: DirectedGraph, beta) -> VertexSet:
    """Hereditary closure of the components with ln rho(A_C) >= beta."""
    _, _, signs = _classify(G, beta)
    ids = _closure_ids(G, (i for i, s in signs.items() if s >= 0))
    return G.vertex_set(_members_of_ids(G, ids))


def _critical_ids(G: DirectedGraph) -> list[int]:
    vals = {
        c.id: math.log(c.spectral_radius) for c in G.components if not c.trivial
    }
    if not vals:
        return []
    top = max(vals.values())
    return sorted(i for i, ln in vals.items() if ln >= top - TOL)


def minimal_critical_components(G: DirectedGraph) -> frozenset[Component]:
    """Components attaining rho(A), minimal in the order induced on them."""
    crit = _critical_ids(G)
    if not crit:
        raise ValueError("an acyclic graph has no critical components")
    mins = [
        c
        for c in crit
        if not any(d != c and c in G.reachable_components(d) for d in crit)
    ]
    return frozenset(G.components[c] for c in mins)


def critical_temperatures(G: DirectedGraph) -> list[CriticalOf]:
    """Ascending list of the critical inverse temperatures, as CriticalOf.

    A candidate ln rho(A_C) survives iff C stays outside H at its own value;
    then the restriction of A to the survivors still has spectral radius
    ln-equal to the candidate.  Values closer than TOL are merged, keeping
    the smallest component id.
    """
    candidates = []
    for c in G.components:
        if c.trivial:
            continue
        ln = math.log(c.spectral_radius)
        above = (
            d.id
            for d in G.components
            if not d.trivial and math.log(d.spectral_radius) > ln + TOL
        )
        if c.id not in _closure_ids(G, above):
            candidates.append((ln, c.id))
    candidates.sort()
    out: list[CriticalOf] = []
    last = None
    for ln, cid in candidates:
        if last is not None and ln <= last + TOL:
            continue
        out.append(CriticalOf(cid))
        last = ln
    return out


# -- state constructions ---------------------------------------------------------


def _quotient_radius(G: DirectedGraph, comp_ids) -> float:
    comps = G.components
    return max((comps[i].spectral_radius for i in comp_ids), default=0.0)


def _psi_measure_worker(
    G: DirectedGraph,
    spec: BetaSpec,
    surv_comp_ids: frozenset[int],
    mc_ids,
    C: Component,
) -> tuple[StateMeasure, dict[str, float]]:
    """psi_C over the subgraph on ``surv_comp_ids``, extended by zero.

    Returns the state and its z-vector (over the vertices of the subgraph
    that stay outside the closure of the minimal critical components);
    removed vertices carry measure zero.
    """
    A = G.matrix
    comps = G.components
    closure = _closure_ids(G, mc_ids) & surv_comp_ids
    outside = surv_comp_ids - closure
    out_idx = sorted(i for cid in outside for i in _comp_indices(G, cid))
    c_idx = [G.index[v] for v in C.members]
    rho = C.spectral_radius
    x = np.array([C.perron_vector[v] for v in C.members])
    if out_idx:
        rhs = A[np.ix_(out_idx, c_idx)].astype(float) @ x / rho
        z = spectral.resolvent_solve(
            A[np.ix_(out_idx, out_idx)],
            math.log(rho),
            rhs,
            radius=_quotient_radius(G, outside),
        )
    else:
        z = np.zeros(0)
    scale = 1.0 / (1.0 + float(z.sum()))
    m = {v: 0.0 for v in G.vertices}
    for i, zi in zip(out_idx, z):
        m[G.vertices[i]] = scale * float(zi)
    for v, xv in zip(C.members, x):
        m[v] = scale * float(xv)
    zdict = {G.vertices[i]: float(zi) for i, zi in zip(out_idx, z)}
    state = StateMeasure(
        beta=spec,
        beta_value=math.log(rho),
        m=m,
        label=PsiC(C),
        factors_through_graph_algebra=True,
        state_type=INFINITE,
    )
    return state, zdict


def _comp_indices(G: DirectedGraph, cid: int) -> list[int]:
    return [G.index[v] for v in G.components[cid].members]


def _check_mc(G: DirectedGraph, C: Component) -> frozenset[int]:
    mc = minimal_critical_components(G)
    ids = {c.id for c in mc}
    if C.id not in ids or G.components[C.id].members != C.members:
        raise ValueError("component is not minimal critical in this graph")
    return frozenset(ids)


def z_vector(G: DirectedGraph, C: Component) -> dict[str, float]:
    """The quick-exit weight vector z^C over the complement of closure(mc).

    z^C = rho^{-1} (1 - rho^{-1} A_out)^{-1} A_{out,C} x^C, where "out" is
    the complement of the hereditary closure of all minimal critical
    components.  Empty complement gives an empty vector.
    """
    mc_ids = _check_mc(G, C)
    all_ids = frozenset(c.id for c in G.components)
    _, zdict = _psi_measure_worker(G, CriticalOf(C.id), all_ids, mc_ids, C)
    return zdict


def psi_C_measure(G: DirectedGraph, C: Component) -> StateMeasure:
    """The infinite-type extreme state attached to a minimal critical component.

    m = (z^C, x^C, 0 on the rest of closure(mc)) scaled to mass one; it
    satisfies the exact eigen-identity A m = rho(A) m.
    """
    mc_ids = _check_mc(G, C)
    all_ids = frozenset(c.id for c in G.components)
    state, _ = _psi_measure_worker(G, CriticalOf(C.id), all_ids, mc_ids, C)
    return state


def beta_v(G: DirectedGraph, v: str) -> float | None:
    """sup of ln rho(A_C) over components C <= v; None when no cycle is below v.

    phi_{beta,v} exists exactly for beta above this value (at every beta when
    None).
    """
    cid = G.component_of(v).id
    best = None
    for c in G.components:
        if c.trivial:
            continue
        if cid in G.reachable_components(c.id):
            ln = math.log(c.spectral_radius)
            best = ln if best is None else max(best, ln)
    return best


def _sources_after_saturating(G: DirectedGraph, sat_members: frozenset[str]) -> set[str]:
    """Vertices that are sources in the quotient by the saturated set."""
    A = G.matrix
    outside = [i for i, v in enumerate(G.vertices) if v not in sat_members]
    outside_mask = np.zeros(len(G.vertices), dtype=bool)
    outside_mask[outside] = True
    return {
        G.vertices[i]
        for i in outside
        if not A[i][outside_mask].any()
    }


def _phi_states(
    G: DirectedGraph,
    spec: BetaSpec,
    bval: float,
    K_comp_ids: frozenset[int],
    quotient_sources: set[str],
) -> list[StateMeasure]:
    """All phi_{beta,v} extremes, one per vertex outside K_beta."""
    A = G.matrix
    all_ids = frozenset(c.id for c in G.components)
    outside = all_ids - K_comp_ids
    out_idx = sorted(i for cid in outside for i in _comp_indices(G, cid))
    if not out_idx:
        return []
    M = A[np.ix_(out_idx, out_idx)]
    resolvent = spectral.resolvent_solve(
        M, bval, np.eye(len(out_idx)), radius=_quotient_radius(G, outside)
    )
    col_sums = resolvent.sum(axis=0)
    states = []
    for pos, i in enumerate(out_idx):
        v = G.vertices[i]
        m = {w: 0.0 for w in G.vertices}
        col = resolvent[:, pos] / col_sums[pos]
        for j, val in zip(out_idx, col):
            m[G.vertices[j]] = float(val)
        states.append(
            StateMeasure(
                beta=spec,
                beta_value=bval,
                m=m,
                label=PhiBetaV(v),
                factors_through_graph_algebra=v in quotient_sources,
                state_type=FINITE,
            )
        )
    return states


def phi_beta_v_measure(G: DirectedGraph, beta, v: str) -> StateMeasure:
    """The finite-type extreme state of the vertex v at beta.

    m_w sums e^{-beta |path|} over the paths with range w and source v,
    normalized by y_v; computed on the quotient by K_beta, which any other
    valid hereditary choice reproduces.
    """
    if v not in G.index:
        raise ValueError(f"unknown vertex: {v}")
    spec, bval, signs = _classify(G, beta)
    K_ids = _closure_ids(G, (i for i, s in signs.items() if s >= 0))
    K_members = frozenset(_members_of_ids(G, K_ids))
    if v in K_members:
        raise ValueError(
            f"phi state undefined: beta must exceed beta_v for vertex {v}"
        )
    sat = saturation(G, G.vertex_set(K_members))
    sources = _sources_after_saturating(G, sat.members)
    for state in _phi_states(G, spec, bval, K_ids, sources):
        if state.label.vertex == v:
            return state
    raise AssertionError("unreachable: v survives K_beta")


def general_state_measure(
    G: DirectedGraph, beta, r: float, epsilon: dict[str, float], t
) -> StateMeasure:
    """Convex mixture r (phi_eps after the quotient) + (1-r) sum t_C psi_C.

    Only defined at critical beta.  epsilon is a nonnegative vector on the
    vertices outside K_beta with epsilon . y = 1; t is a probability vector
    over the minimal critical components of the quotient by H_beta.
    """
    spec, bval, signs = _classify(G, beta)
    H_ids = _closure_ids(G, (i for i, s in signs.items() if s > 0))
    all_ids = frozenset(c.id for c in G.components)
    surv_ids = all_ids - H_ids
    crit_surv = [i for i, s in signs.items() if s == 0 and i not in H_ids]
    n_members = sum(len(G.components[i].members) for i in H_ids)
    if n_members == len(G.vertices) or not crit_surv:
        raise ValueError("beta is not critical for this graph")
    if not -TOL <= r <= 1.0 + TOL:
        raise ValueError("r must lie in [0, 1]")
    r = min(max(r, 0.0), 1.0)

    mc_ids = sorted(
        c
        for c in crit_surv
        if not any(d != c and c in G.reachable_components(d) for d in crit_surv)
    )
    tmap: dict[int, float] = {}
    for key, weight in dict(t).items():
        cid = key.id if isinstance(key, Component) else int(key)
        if cid not in mc_ids:
            raise ValueError(f"t is keyed by component {cid}, not minimal critical")
        tmap[cid] = float(weight)
    if any(w < -TOL for w in tmap.values()) or abs(sum(tmap.values()) - 1.0) > TOL:
        raise ValueError("t is not a probability vector")

    K_ids = _closure_ids(G, (i for i, s in signs.items() if s >= 0))
    K_members = frozenset(_members_of_ids(G, K_ids))
    out_idx = sorted(
        i for cid in (all_ids - K_ids) for i in _comp_indices(G, cid)
    )
    eps_map = {str(k): float(w) for k, w in dict(epsilon).items()}
    for name, w in eps_map.items():
        if name not in G.index:
            raise ValueError(f"unknown vertex in epsilon: {name}")
        if w < -TOL:
            raise ValueError("epsilon must be nonnegative")
        if w > TOL and name in K_members:
            raise ValueError(
                f"epsilon charges {name} inside K_beta, where the series diverges"
            )
    eps_vec = np.array([eps_map.get(G.vertices[i], 0.0) for i in out_idx])
    A = G.matrix
    radius_out = _quotient_radius(G, all_ids - K_ids)
    if out_idx:
        M = A[np.ix_(out_idx, out_idx)]
        y = np.linalg.solve(
            (np.eye(len(out_idx)) - math.exp(-bval) * M).T, np.ones(len(out_idx))
        )
        if abs(float(eps_vec @ y) - 1.0) > TOL:
            raise ValueError("epsilon . y must equal 1")
        phi_part = spectral.resolvent_solve(M, bval, eps_vec, radius=radius_out)
    else:
        # Nothing survives K_beta, so no phi part can exist at all.
        if r > TOL or any(w > TOL for w in eps_map.values()):
            raise ValueError("no vertices outside K_beta: r must be 0")
        phi_part = np.zeros(0)

    m = {v: 0.0 for v in G.vertices}
    for i, val in zip(out_idx, phi_part):
        m[G.vertices[i]] += r * float(val)
    for cid in mc_ids:
        weight = tmap.get(cid, 0.0)
        if weight == 0.0:
            continue
        psi, _ = _psi_measure_worker(G, spec, surv_ids, mc_ids, G.components[cid])
        for v, val in psi.m.items():
            m[v] += (1.0 - r) * weight * val

    sat = saturation(G, G.vertex_set(K_members))
    sources = _sources_after_saturating(G, sat.members)
    phi_factors = all(
        G.vertices[i] in sources
        for i, w in zip(out_idx, eps_vec)
        if w > TOL
    )
    factors = (r <= TOL) or phi_factors
    if r <= TOL:
        kind = INFINITE
    elif r >= 1.0 - TOL:
        kind = FINITE
    else:
        kind = MIXED
    return StateMeasure(
        beta=spec,
        beta_value=bval,
        m=m,
        label=Mixture(r=r, epsilon=eps_map, t=tmap),
        factors_through_graph_algebra=factors,
        state_type=kind,
    )


def kms_simplex(G: DirectedGraph, beta) -> SimplexDescriptor:
    """The full KMS simplex at beta: case tag plus every extreme point.

    Empty when H_beta is everything; Subcritical (phi states only, one per
    surviving vertex) when beta clears the surviving spectral radius;
    Critical (psi states of the quotient's minimal critical components plus
    phi states outside K_beta) on the boundary.
    """
    spec, bval, signs = _classify(G, beta)
    H_ids = _closure_ids(G, (i for i, s in signs.items() if s > 0))
    K_ids = _closure_ids(G, (i for i, s in signs.items() if s >= 0))
    H_vs = G.vertex_set(_members_of_ids(G, H_ids))
    K_vs = G.vertex_set(_members_of_ids(G, K_ids))
    if len(H_vs.members) == len(G.vertices):
        return SimplexDescriptor(
            beta=spec,
            beta_value=bval,
            case=EMPTY,
            H_beta=H_vs,
            K_beta=K_vs,
            extremes=(),
        )
    all_ids = frozenset(c.id for c in G.components)
    crit_surv = [i for i, s in signs.items() if s == 0 and i not in H_ids]
    sat = saturation(G, K_vs)
    sources = _sources_after_saturating(G, sat.members)
    phi = _phi_states(G, spec, bval, K_ids, sources)
    if not crit_surv:
        return SimplexDescriptor(
            beta=spec,
            beta_value=bval,
            case=SUBCRITICAL,
            H_beta=H_vs,
            K_beta=K_vs,
            extremes=tuple(phi),
        )
    mc_ids = sorted(
        c
        for c in crit_surv
        if not any(d != c and c in G.reachable_components(d) for d in crit_surv)
    )
    surv_ids = all_ids - H_ids
    psi = [
        _psi_measure_worker(G, spec, surv_ids, mc_ids, G.components[cid])[0]
        for cid in mc_ids
    ]
    return SimplexDescriptor(
        beta=spec,
        beta_value=bval,
        case=CRITICAL,
        H_beta=H_vs,
        K_beta=K_vs,
        extremes=tuple(psi) + tuple(phi),
    )


def factors_through_graph_algebra(G: DirectedGraph, state: StateMeasure) -> bool:
    """Recompute whether the state kills every generating projection gap.

    psi states always factor; a phi state factors iff its vertex is a source
    of the quotient by the saturation of K_beta; a mixture factors iff every
    positively weighted extreme does.
    """
    for v in state.m:
        if v not in G.index:
            raise ValueError("state does not belong to this graph")
    label = state.label
    if isinstance(label, PsiC):
        return True
    _, _, signs = _classify(G, state.beta)
    K_ids = _closure_ids(G, (i for i, s in signs.items() if s >= 0))
    sat = saturation(G, G.vertex_set(_members_of_ids(G, K_ids)))
    sources = _sources_after_saturating(G, sat.members)
    if isinstance(label, PhiBetaV):
        return label.vertex in sources
    if label.r <= TOL:
        return True
    return all(
        v in sources for v, w in label.epsilon.items() if w > TOL
    )


def eval_state(state: StateMeasure, mu, nu) -> float:
    """phi(s_mu s_nu^*) = delta_{mu,nu} e^{-beta |mu|} m_{s(mu)}.

    Paths are either a vertex name (length zero) or a tuple of
    (source, range, copy) edge triples ordered range-to-source, so that each
    triple's source matches the next one's range.
    """
    for path in (mu, nu):
        _validate_path(path)
    if mu != nu:
        return 0.0
    if isinstance(mu, str):
        if mu not in state.m:
            raise ValueError(f"unknown vertex: {mu}")
        return state.m[mu]
    length = len(mu)
    src = mu[-1][0]
    if src not in state.m:
        raise ValueError(f"unknown vertex: {src}")
    return math.exp(-state.beta_value * length) * state.m[src]


def _validate_path(path) -> None:
    if isinstance(path, str):
        return
    if not isinstance(path, tuple) or not path:
        raise ValueError(f"not a path: {path!r}")
    for prev, nxt in zip(path, path[1:]):
        if prev[0] != nxt[1]:
            raise ValueError(
                f"invalid path: edge into {prev[0]} followed by edge out of {nxt[1]}"
            )


def perron_check(poly, which_root: float) -> bool:
    """Is the designated root of its (asserted) minimal polynomial Perron?

    True iff the root is >= 1 and strictly dominates the modulus of every
    other root.  Roots come from the companion matrix; irreducibility of the
    polynomial is the caller's responsibility.
    """
    coeffs = list(poly)
    if len(coeffs) < 2:
        raise ValueError("polynomial must have degree at least 1")
    for c in coeffs:
        if abs(c - round(c)) > 1e-12:
            raise ValueError("coefficients must be integers")
    if round(coeffs[0]) != 1:
        raise ValueError("polynomial must be monic")
    roots = np.roots([round(c) for c in coeffs])
    dist = np.abs(roots - which_root)
    pick = int(np.argmin(dist))
    if dist[pick] > 1e-6:
        raise ValueError(
            f"no root within 1e-6 of {which_root}; roots are {roots}"
        )
    lam = roots[pick].real
    if lam < 1.0 - TOL:
        return False
    others = np.abs(np.delete(roots, pick))
    return bool(np.all(lam > others + TOL))


def state_type(state: StateMeasure) -> str:
    return state.state_type
