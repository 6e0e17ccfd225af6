"""Quantum operations and their causal structure.

Kraus sets and the POVMs they induce, Choi-matrix complete-positivity
certification, no-signalling checks for factor-local instruments,
semicausality probing of bipartite measurements with concrete witnesses,
a LOCC protocol simulator, the teleportation identity, and CHSH
correlation values with their quantum bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._errors import DimensionError, ValidationError
from . import qstate
from .qstate import DensityMatrix, PureState, hermitize

__all__ = [
    "KrausSet",
    "Povm",
    "BipartiteOperation",
    "ChoiMatrix",
    "SemicausalVerdict",
    "LoccStep",
    "kraus_from_unitary",
    "apply",
    "povm_of",
    "choi_and_cp_check",
    "verify_no_signalling",
    "is_semicausal",
    "simulate_locc_protocol",
    "teleport_identity_residual",
    "simulate_teleportation",
    "chsh_value",
    "chsh_optimize",
    "cluster_chsh_bound",
    "bell_state",
    "complete_bell_pvm",
    "incomplete_bell_pvm",
    "conditioned_basis_pvm",
    "conditioned_basis_protocol",
]

_TOL = 1e-12


# ---------------------------------------------------------------------------
# core containers

@dataclass(frozen=True)
class KrausSet:
    """Indexed family of Kraus matrices A[outcome][internal index].

    ops[mu][m] is a dim_out x dim_in complex matrix. The set must resolve
    the identity, sum A†A = 1 (or be sub-normalized when the instrument is
    explicitly flagged as such).
    """

    dim_in: int
    dim_out: int
    ops: tuple
    subnormalized: bool = False

    def __post_init__(self):
        ops = tuple(
            tuple(np.asarray(a, dtype=complex) for a in branch) for branch in self.ops
        )
        if not ops or any(not branch for branch in ops):
            raise ValidationError("Kraus set needs at least one matrix per outcome")
        for branch in ops:
            for a in branch:
                if a.shape != (self.dim_out, self.dim_in):
                    raise DimensionError(
                        f"Kraus matrix shape {a.shape} != ({self.dim_out}, {self.dim_in})")
        total = sum(a.conj().T @ a for branch in ops for a in branch)
        gap = np.abs(total - np.eye(self.dim_in)).max()
        if self.subnormalized:
            if np.linalg.eigvalsh(hermitize(total)).max() > 1.0 + 1e-9:
                raise ValidationError("sub-normalized instrument exceeds the identity")
        elif gap > 1e-9:
            raise ValidationError(f"Kraus set is not trace-preserving (gap {gap:.2e})")
        object.__setattr__(self, "ops", ops)

    @property
    def n_outcomes(self) -> int:
        return len(self.ops)

    @classmethod
    def from_projectors(cls, projectors: Sequence[np.ndarray]) -> "KrausSet":
        """PVM as an instrument: one Kraus matrix per projector."""
        projectors = [np.asarray(p, dtype=complex) for p in projectors]
        d = projectors[0].shape[0]
        return cls(dim_in=d, dim_out=d, ops=tuple((p,) for p in projectors))

    @classmethod
    def single(cls, matrices: Sequence[np.ndarray]) -> "KrausSet":
        """All matrices under one outcome (a plain channel)."""
        matrices = [np.asarray(a, dtype=complex) for a in matrices]
        return cls(dim_in=matrices[0].shape[1], dim_out=matrices[0].shape[0],
                   ops=(tuple(matrices),))


@dataclass(frozen=True)
class Povm:
    """PSD elements resolving the identity; outcome mu fires with tr(rho E_mu)."""

    dim: int
    elements: tuple

    def __post_init__(self):
        elements = tuple(hermitize(e) for e in self.elements)
        for e in elements:
            if e.shape != (self.dim, self.dim):
                raise DimensionError("POVM element has wrong shape")
            if np.linalg.eigvalsh(e).min() < -1e-9:
                raise ValidationError("POVM element is not PSD")
        gap = np.abs(sum(elements) - np.eye(self.dim)).max()
        if gap > 1e-9:
            raise ValidationError(f"POVM does not resolve the identity (gap {gap:.2e})")
        object.__setattr__(self, "elements", elements)

    def probabilities(self, rho) -> np.ndarray:
        m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        return np.array([np.trace(e @ m).real for e in self.elements])


@dataclass(frozen=True)
class BipartiteOperation:
    """Outcome-indexed operation on a two-factor space."""

    dims: tuple
    kraus: KrausSet

    def __post_init__(self):
        da, db = self.dims
        if self.kraus.dim_in != da * db or self.kraus.dim_out != da * db:
            raise DimensionError("Kraus set does not act on the product space")


@dataclass(frozen=True)
class ChoiMatrix:
    """(d_in*d_out)^2 Hermitian certificate of a linear map."""

    matrix: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        m = hermitize(self.matrix)
        if m.shape != (self.dim_in * self.dim_out,) * 2:
            raise DimensionError("Choi matrix has inconsistent shape")
        object.__setattr__(self, "matrix", m)


# ---------------------------------------------------------------------------
# construction and application

def kraus_from_unitary(U: np.ndarray, apparatus_init: PureState,
                       outcome_partition: Sequence[Sequence[np.ndarray]]) -> KrausSet:
    """Kraus matrices of a premeasurement unitary.

    U acts on system (x) apparatus (system index slow). The apparatus starts
    in apparatus_init; outcome_partition lists, per macroscopic outcome, an
    orthonormal basis of the apparatus subspace it occupies. Entry (sigma, s)
    of A[mu][m] is <sigma, b_mu_m| U |s, init>.
    """
    U = np.asarray(U, dtype=complex)
    d_total = U.shape[0]
    if U.shape != (d_total, d_total) or np.abs(U @ U.conj().T - np.eye(d_total)).max() > 1e-10:
        raise ValidationError("premeasurement matrix is not unitary")
    init = apparatus_init.amplitudes
    d_app = init.size
    if d_total % d_app:
        raise DimensionError("apparatus dimension does not divide the total")
    d_sys = d_total // d_app

    vectors = [np.asarray(v, dtype=complex).ravel() for branch in outcome_partition
               for v in branch]
    if len(vectors) != d_app:
        raise ValidationError("partition does not span the apparatus space")
    V = np.array(vectors)
    if np.abs(V @ V.conj().T - np.eye(d_app)).max() > 1e-10:
        raise ValidationError("partition subspaces are not orthonormal")

    # |s, init> columns, U applied, then projected on <sigma, b|
    Ut = U.reshape(d_sys, d_app, d_sys, d_app)
    ops = []
    for branch in outcome_partition:
        branch_ops = []
        for b in branch:
            b = np.asarray(b, dtype=complex).ravel()
            # A[sigma, s] = sum_{a, a'} conj(b_a) U[(sigma a), (s a')] init_a'
            A = np.einsum("a,zast,t->zs", b.conj(), Ut, init)
            branch_ops.append(A)
        ops.append(tuple(branch_ops))
    return KrausSet(dim_in=d_sys, dim_out=d_sys, ops=tuple(ops))


def apply(k: KrausSet, rho) -> list:
    """Outcome probabilities and renormalized post-states.

    Returns [(p_mu, DensityMatrix or None)]; outcomes with p below 1e-12
    are numerically empty and carry None.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (k.dim_in, k.dim_in):
        raise DimensionError(f"state dim {m.shape[0]} != channel input {k.dim_in}")
    out = []
    for branch in k.ops:
        unnorm = sum(a @ m @ a.conj().T for a in branch)
        p = float(np.trace(unnorm).real)
        if p < _TOL:
            out.append((max(p, 0.0), None))
        else:
            out.append((p, DensityMatrix(hermitize(unnorm) / p)))
    return out


def povm_of(k: KrausSet) -> Povm:
    """E_mu = sum_m A†A for each outcome."""
    elements = tuple(
        sum(a.conj().T @ a for a in branch) for branch in k.ops
    )
    return Povm(dim=k.dim_in, elements=elements)


def _apply_map(k_or_fn, rho: np.ndarray, dim_in: int) -> np.ndarray:
    if isinstance(k_or_fn, KrausSet):
        return sum(a @ rho @ a.conj().T for branch in k_or_fn.ops for a in branch)
    return np.asarray(k_or_fn(rho), dtype=complex)


def choi_and_cp_check(map_or_kraus, dim_in: int | None = None) -> tuple:
    """Choi matrix of a linear map plus its complete-positivity verdict.

    Accepts a KrausSet or a callable rho -> rho' (dim_in then required).
    Returns (ChoiMatrix, is_cp, min_eig) where min_eig is the smallest
    eigenvalue of the trace-normalized Choi matrix; the map is CP iff
    min_eig >= -tol_psd.
    """
    if isinstance(map_or_kraus, KrausSet):
        dim_in = map_or_kraus.dim_in
    elif dim_in is None:
        raise ValueError("dim_in is required for a callable map")
    blocks = []
    for i in range(dim_in):
        row = []
        for j in range(dim_in):
            probe = np.zeros((dim_in, dim_in), dtype=complex)
            probe[i, j] = 1.0
            # copy: the callable may hand back a view of the probe
            row.append(np.array(_apply_map(map_or_kraus, probe, dim_in),
                                dtype=complex, copy=True))
        blocks.append(row)
    dim_out = blocks[0][0].shape[0]
    C = np.block(blocks)
    choi = ChoiMatrix(matrix=C, dim_in=dim_in, dim_out=dim_out)
    tr = np.trace(choi.matrix).real
    if abs(tr) < _TOL:
        raise ValidationError("map has vanishing trace; cannot normalize Choi")
    min_eig = float(np.linalg.eigvalsh(choi.matrix / tr).min())
    return choi, min_eig >= -qstate.TOL_PSD, min_eig


# ---------------------------------------------------------------------------
# causality checks

def _embed(a: KrausSet, side: str, dims: tuple) -> KrausSet:
    da, db = dims
    eye = np.eye(db if side == "A" else da, dtype=complex)
    ops = []
    for branch in a.ops:
        if side == "A":
            ops.append(tuple(np.kron(m, eye) for m in branch))
        else:
            ops.append(tuple(np.kron(eye, m) for m in branch))
    return KrausSet(dim_in=da * db, dim_out=da * db, ops=tuple(ops),
                    subnormalized=a.subnormalized)


def _sum_channel(k: KrausSet, rho: np.ndarray) -> np.ndarray:
    return sum(a @ rho @ a.conj().T for branch in k.ops for a in branch)


def _marginal(rho: np.ndarray, dims: tuple, keep: int) -> np.ndarray:
    n = len(dims)
    t = rho.reshape(dims + dims)
    row = list(range(n))
    col = [i if i != keep else n + i for i in range(n)]
    return np.einsum(t, row + col, [keep, n + keep])


def verify_no_signalling(a: KrausSet, b: KrausSet, rho, trials: int = 100,
                         seed: int = 20240901) -> dict:
    """Check that factor-local instruments cannot shift each other's statistics.

    a acts on the first factor, b on the second (embedded as A x 1 and
    1 x B). For the supplied state plus `trials` seeded Haar-random pure
    states, compares each party's outcome distribution with and without
    the other party acting first. Returns a report with the worst total-
    variation shift; commuting embeddings keep it at round-off level.
    """
    dims = (a.dim_in, b.dim_in)
    d = dims[0] * dims[1]
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (d, d):
        raise DimensionError("state does not live on the product space")
    a_emb, b_emb = _embed(a, "A", dims), _embed(b, "B", dims)
    povm_a, povm_b = povm_of(a_emb), povm_of(b_emb)

    rng = np.random.default_rng(seed)
    states = [m] + [np.outer(v, v.conj())
                    for v in (qstate.haar_state(d, rng) for _ in range(trials))]
    worst = 0.0
    for s in states:
        # Bob's statistics, with and without Alice acting first
        pb0 = povm_b.probabilities(s)
        pb1 = povm_b.probabilities(_sum_channel(a_emb, s))
        pa0 = povm_a.probabilities(s)
        pa1 = povm_a.probabilities(_sum_channel(b_emb, s))
        worst = max(worst,
                    0.5 * np.abs(pb1 - pb0).sum(),
                    0.5 * np.abs(pa1 - pa0).sum())
    return {"max_marginal_shift": float(worst), "states_tested": len(states)}


@dataclass(frozen=True)
class SemicausalVerdict:
    semicausal: bool
    direction: str
    advantage: float
    witness: dict | None

    def to_report(self, operation_id: str, tolerance: float) -> dict:
        """JSON-ready witness report for the CLI causality subcommand."""
        return {
            "operation_id": operation_id,
            "direction": self.direction,
            "semicausal": self.semicausal,
            "witness_pre_op": None if self.witness is None else self.witness["pre_op"],
            "witness_state": None if self.witness is None else self.witness["state"],
            "advantage": self.advantage,
            "tolerance": tolerance,
        }


_PAULI_FAMILY = (
    ("identity", np.eye(2, dtype=complex)),
    ("pauli_x", qstate.SIGMA_X),
    ("pauli_y", qstate.SIGMA_Y),
    ("pauli_z", qstate.SIGMA_Z),
)


def is_semicausal(T: BipartiteOperation, direction: str = "B->A",
                  probe_states: Sequence | None = None, tol: float = 1e-9,
                  haar_probes: int = 200, seed: int = 77) -> SemicausalVerdict:
    """Probe whether the sending side can signal through the summed operation.

    direction 'B->A' asks whether Bob, acting just before the global
    operation, can change Alice's marginal (and vice versa for 'A->B').
    The sender's pre-operations run over the Pauli family plus seeded Haar
    unitaries; probe states default to computational products, Bell states
    and seeded Haar states. A verdict of semicausal means no witness was
    found over the probe family, not a proof. When a witness exists it
    reports the optimal discrimination probability 1 - P_E of the two
    receiver marginals.
    """
    if direction not in ("B->A", "A->B"):
        raise ValueError("direction must be 'B->A' or 'A->B'")
    da, db = T.dims
    d = da * db
    sender_dim = db if direction == "B->A" else da
    receiver_idx = 0 if direction == "B->A" else 1

    rng = np.random.default_rng(seed)
    if probe_states is None:
        probe_states = []
        for i in range(min(d, 4)):
            v = np.zeros(d, dtype=complex)
            v[i] = 1.0
            probe_states.append(v)
        if (da, db) == (2, 2):
            probe_states += [bell_state(name) for name in ("phi+", "phi-", "psi+", "psi-")]
        probe_states += [qstate.haar_state(d, rng) for _ in range(8)]

    pre_ops = [(name, u) for name, u in _PAULI_FAMILY if u.shape[0] == sender_dim]
    if not pre_ops:
        pre_ops = [("identity", np.eye(sender_dim, dtype=complex))]
    pre_ops += [(f"haar_{i}", qstate.haar_unitary(sender_dim, rng))
                for i in range(haar_probes)]

    def embed_pre(u):
        if direction == "B->A":
            return np.kron(np.eye(da, dtype=complex), u)
        return np.kron(u, np.eye(db, dtype=complex))

    best = {"advantage": 0.5, "witness": None}
    for s_idx, v in enumerate(probe_states):
        v = np.asarray(v, dtype=complex).ravel()
        rho0 = np.outer(v, v.conj())
        marginals = []
        for name, u in pre_ops:
            ue = embed_pre(u)
            out = _sum_channel(T.kraus, ue @ rho0 @ ue.conj().T)
            marginals.append((name, _marginal(out, T.dims, receiver_idx)))
        base_name, base = marginals[0]
        for name, marg in marginals[1:]:
            pe = qstate.error_probability(hermitize(base), hermitize(marg))
            adv = 1.0 - pe
            if adv > best["advantage"] + 1e-15:
                best = {
                    "advantage": adv,
                    "witness": {"pre_op": name, "state": f"probe_{s_idx}",
                                "versus": base_name},
                }
    found = best["witness"] is not None and best["advantage"] > 0.5 + tol
    return SemicausalVerdict(
        semicausal=not found,
        direction=direction,
        advantage=float(best["advantage"]) if found else 0.5,
        witness=best["witness"] if found else None,
    )


# ---------------------------------------------------------------------------
# LOCC simulation

@dataclass(frozen=True)
class LoccStep:
    """One local round: the acting party and an instrument chooser that maps
    the message history (tuple of earlier outcomes) to a local KrausSet."""

    party: str
    instrument: Callable[[tuple], KrausSet]


def simulate_locc_protocol(protocol: Sequence[LoccStep], rho,
                           dims: tuple = (2, 2)) -> dict:
    """Outcome distribution of an ordered local protocol with classical messages.

    Returns {message tuple: probability}. Instruments are validated per
    branch; a chooser returning an instrument of the wrong dimension is a
    malformed conditioning graph.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    d = dims[0] * dims[1]
    if m.shape != (d, d):
        raise DimensionError("input does not live on the bipartite space")

    dist: dict = {}

    def descend(state, weight, history, step_idx):
        if step_idx == len(protocol):
            dist[history] = dist.get(history, 0.0) + weight
            return
        step = protocol[step_idx]
        if step.party not in ("A", "B"):
            raise ValidationError(f"unknown party {step.party!r}")
        local = step.instrument(history)
        want = dims[0] if step.party == "A" else dims[1]
        if local.dim_in != want or local.dim_out != want:
            raise ValidationError("conditioned instrument has wrong local dimension")
        emb = _embed(local, step.party, dims)
        for mu, branch in enumerate(emb.ops):
            unnorm = sum(a @ state @ a.conj().T for a in branch)
            p = float(np.trace(unnorm).real)
            if p < _TOL:
                dist[history + (mu,)] = dist.get(history + (mu,), 0.0) + 0.0
                continue
            descend(unnorm / p, weight * p, history + (mu,), step_idx + 1)

    descend(m, 1.0, (), 0)
    return dist


# ---------------------------------------------------------------------------
# standard two-qubit objects

def bell_state(name: str) -> np.ndarray:
    s = 1.0 / np.sqrt(2.0)
    table = {
        "phi+": np.array([s, 0, 0, s]),
        "phi-": np.array([s, 0, 0, -s]),
        "psi+": np.array([0, s, s, 0]),
        "psi-": np.array([0, s, -s, 0]),
    }
    return table[name].astype(complex)


def complete_bell_pvm() -> BipartiteOperation:
    projs = [np.outer(bell_state(n), bell_state(n).conj())
             for n in ("phi+", "phi-", "psi+", "psi-")]
    return BipartiteOperation(dims=(2, 2), kraus=KrausSet.from_projectors(projs))


def incomplete_bell_pvm() -> BipartiteOperation:
    """Two-outcome measurement {P, 1-P} onto the phi+ Bell state."""
    p1 = np.outer(bell_state("phi+"), bell_state("phi+").conj())
    return BipartiteOperation(dims=(2, 2),
                              kraus=KrausSet.from_projectors([p1, np.eye(4) - p1]))


def conditioned_basis_pvm() -> BipartiteOperation:
    """Product PVM whose second-qubit basis depends on the first qubit:
    projectors |0,0>, |0,1>, |1,+>, |1,->."""
    zero, one = np.array([1.0, 0]), np.array([0, 1.0])
    plus, minus = np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)
    vecs = [np.kron(zero, zero), np.kron(zero, one),
            np.kron(one, plus), np.kron(one, minus)]
    projs = [np.outer(v, v.conj()) for v in vecs]
    return BipartiteOperation(dims=(2, 2), kraus=KrausSet.from_projectors(projs))


def conditioned_basis_protocol() -> list:
    """One-way LOCC realization of conditioned_basis_pvm: the first party
    measures {|0>,|1>} and the second picks its basis from the message."""
    zero, one = np.array([1.0, 0]), np.array([0, 1.0])
    plus, minus = np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)
    z_pvm = KrausSet.from_projectors([np.outer(zero, zero), np.outer(one, one)])
    x_pvm = KrausSet.from_projectors([np.outer(plus, plus.conj()),
                                      np.outer(minus, minus.conj())])

    def alice(_history):
        return z_pvm

    def bob(history):
        return z_pvm if history[0] == 0 else x_pvm

    return [LoccStep("A", alice), LoccStep("B", bob)]


def locc_outcome_to_global(message: tuple) -> int:
    """Map (alice bit, bob bit) messages to conditioned_basis_pvm outcomes."""
    a, b = message
    return b if a == 0 else 2 + b


# ---------------------------------------------------------------------------
# teleportation identity

def _pi_rotation(axis: str) -> np.ndarray:
    # exp(-i pi sigma_k / 2) = -i sigma_k
    table = {"x": qstate.SIGMA_X, "y": qstate.SIGMA_Y, "z": qstate.SIGMA_Z}
    return -1j * table[axis]


# Unit phases making the Bell-basis expansion of |psi>|singlet> exact with
# pi rotations exp(-i pi sigma_k/2); fixed constants, independent of psi.
_TELEPORT_PHASES = {"id": -1.0, "z": -1.0j, "x": 1.0j, "y": 1.0}


def teleport_identity_residual(alpha: complex, beta: complex) -> float:
    """Residual of the Bell-basis teleportation identity for (alpha, beta).

    Builds |psi>|singlet> and its four-term Bell expansion, whose third-
    register states are pi-rotated copies of |psi| with fixed unit phases,
    and returns the Frobenius distance of the two rank-1 projectors (so a
    global phase cannot contribute).
    """
    nrm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    if abs(nrm - 1.0) > 1e-9:
        raise ValidationError("input amplitudes must be normalized")
    psi = np.array([alpha, beta], dtype=complex)
    lhs = np.kron(psi, bell_state("psi-"))
    rhs = 0.5 * (
        np.kron(bell_state("psi-"), _TELEPORT_PHASES["id"] * psi)
        + np.kron(bell_state("psi+"), _TELEPORT_PHASES["z"] * (_pi_rotation("z") @ psi))
        + np.kron(bell_state("phi-"), _TELEPORT_PHASES["x"] * (_pi_rotation("x") @ psi))
        + np.kron(bell_state("phi+"), _TELEPORT_PHASES["y"] * (_pi_rotation("y") @ psi))
    )
    return float(np.linalg.norm(np.outer(lhs, lhs.conj()) - np.outer(rhs, rhs.conj())))


def simulate_teleportation(alpha: complex, beta: complex) -> dict:
    """Full teleportation: Bell measurement on registers 0,1 plus the
    outcome-conditioned pi rotation on register 2. Returns the worst-case
    fidelity of the corrected state with the input over the four outcomes."""
    psi = np.array([alpha, beta], dtype=complex)
    psi = psi / np.linalg.norm(psi)
    state = np.kron(psi, bell_state("psi-"))
    corrections = {"psi-": np.eye(2, dtype=complex), "psi+": _pi_rotation("z"),
                   "phi-": _pi_rotation("x"), "phi+": _pi_rotation("y")}
    fidelities, probs = [], []
    for name, corr in corrections.items():
        proj = np.kron(np.outer(bell_state(name), bell_state(name).conj()),
                       np.eye(2, dtype=complex))
        branch = proj @ state
        p = float(np.vdot(branch, branch).real)
        probs.append(p)
        # Bob's conditional state: contract the Bell outcome off registers 0,1
        bob = np.einsum("a,ab->b", bell_state(name).conj(), branch.reshape(4, 2))
        bob = corr @ bob
        nb = np.linalg.norm(bob)
        fidelities.append(abs(np.vdot(psi, bob / nb)) ** 2 if nb > 0 else 0.0)
    return {"min_fidelity": float(min(fidelities)), "probabilities": probs}


# ---------------------------------------------------------------------------
# CHSH

def _check_pm_observable(X: np.ndarray, tol: float = 1e-9) -> None:
    if np.abs(hermitize(X) - X).max() > tol or np.abs(X @ X - np.eye(X.shape[0])).max() > tol:
        raise ValidationError("observable must be Hermitian with X^2 = 1")


def chsh_value(rho, A1, A2, B1, B2) -> float:
    """zeta = tr{rho [A1(B1+B2) + A2(B1-B2)]} / 2 for +-1-spectrum observables."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    for X in (A1, A2, B1, B2):
        _check_pm_observable(np.asarray(X, dtype=complex))
    op = np.kron(A1, B1 + B2) + np.kron(A2, B1 - B2)
    return float(0.5 * np.trace(m @ op).real)


def _correlation_matrix(m: np.ndarray) -> np.ndarray:
    T = np.empty((3, 3))
    for i, si in enumerate(_SIGMAS):
        for j, sj in enumerate(_SIGMAS):
            T[i, j] = np.trace(m @ np.kron(si, sj)).real
    return T


_SIGMAS = (qstate.SIGMA_X, qstate.SIGMA_Y, qstate.SIGMA_Z)


def _bloch_obs(n: np.ndarray) -> np.ndarray:
    return n[0] * qstate.SIGMA_X + n[1] * qstate.SIGMA_Y + n[2] * qstate.SIGMA_Z


def chsh_optimize(rho, method: str = "analytic") -> tuple:
    """Maximum of chsh_value over two-qubit measurement settings.

    'analytic': the two largest singular values s1, s2 of the correlation
    matrix give sqrt(s1^2 + s2^2) together with explicit optimal Bloch
    settings. 'grid': deterministic polar grid over the second party's
    settings (17 x 33, two refinement levels) with the first party's
    response computed analytically; used as the independent cross-check.
    Returns (zeta_max, settings dict).
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionError("CHSH optimization is defined for two qubits")
    T = _correlation_matrix(m)
    if method == "analytic":
        U, s, Vt = np.linalg.svd(T)
        c1, c2 = Vt[0], Vt[1]
        tc1, tc2 = T @ c1, T @ c2
        n1 = np.linalg.norm(tc1)
        n2 = np.linalg.norm(tc2)
        a1 = tc1 / n1 if n1 > 1e-14 else np.array([0.0, 0.0, 1.0])
        a2 = tc2 / n2 if n2 > 1e-14 else np.array([1.0, 0.0, 0.0])
        phi = np.arctan2(s[1], s[0])
        b1 = np.cos(phi) * c1 + np.sin(phi) * c2
        b2 = np.cos(phi) * c1 - np.sin(phi) * c2
        zeta = float(np.sqrt(s[0] ** 2 + s[1] ** 2))
        settings = {"a1": a1, "a2": a2, "b1": b1, "b2": b2}
        return zeta, settings
    if method == "grid":
        return _chsh_grid(T)
    raise ValueError(f"unknown method {method!r}")


def _polar_grid(n_theta: int, n_phi: int, center=None, spread=None):
    if center is None:
        thetas = np.linspace(0.0, np.pi, n_theta)
        phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    else:
        t0, p0 = center
        thetas = np.linspace(max(0.0, t0 - spread), min(np.pi, t0 + spread), n_theta)
        phis = np.linspace(p0 - spread, p0 + spread, n_phi)
    out = []
    for t in thetas:
        for p in phis:
            out.append((np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p),
                                  np.cos(t)]), (t, p)))
    return out


def _chsh_grid(T: np.ndarray) -> tuple:
    def zeta_of(b1, b2):
        # optimal first-party response: a_i along T(b1 +- b2)
        return 0.5 * (np.linalg.norm(T @ (b1 + b2)) + np.linalg.norm(T @ (b1 - b2)))

    grid = _polar_grid(17, 33)
    best = (-1.0, None, None)
    for b1, ang1 in grid:
        for b2, ang2 in grid:
            z = zeta_of(b1, b2)
            if z > best[0]:
                best = (z, ang1, ang2)
    spread = np.pi / 16
    for _ in range(2):
        g1 = _polar_grid(9, 9, center=best[1], spread=spread)
        g2 = _polar_grid(9, 9, center=best[2], spread=spread)
        for b1, ang1 in g1:
            for b2, ang2 in g2:
                z = zeta_of(b1, b2)
                if z > best[0]:
                    best = (z, ang1, ang2)
        spread /= 8
    z, ang1, ang2 = best
    b1 = np.array([np.sin(ang1[0]) * np.cos(ang1[1]),
                   np.sin(ang1[0]) * np.sin(ang1[1]), np.cos(ang1[0])])
    b2 = np.array([np.sin(ang2[0]) * np.cos(ang2[1]),
                   np.sin(ang2[0]) * np.sin(ang2[1]), np.cos(ang2[0])])
    tb1, tb2 = T @ (b1 + b2), T @ (b1 - b2)
    a1 = tb1 / np.linalg.norm(tb1) if np.linalg.norm(tb1) > 1e-14 else np.array([0, 0, 1.0])
    a2 = tb2 / np.linalg.norm(tb2) if np.linalg.norm(tb2) > 1e-14 else np.array([1.0, 0, 0])
    return float(z), {"a1": a1, "a2": a2, "b1": b1, "b2": b2}


def settings_to_observables(settings: dict) -> tuple:
    """Bloch settings -> Hermitian +-1 observables (A1, A2, B1, B2)."""
    return tuple(_bloch_obs(settings[k]) for k in ("a1", "a2", "b1", "b2"))


def cluster_chsh_bound(m: float, r: float) -> float:
    """Vacuum correlation bound 1 + 4 exp(-m r) for lowest mass m and
    separation r (inverse units of each other)."""
    if m < 0 or r < 0:
        raise ValidationError("mass and separation must be non-negative")
    return float(1.0 + 4.0 * np.exp(-m * r))
