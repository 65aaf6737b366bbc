"""Preparation-interaction-postselection-detection pipeline.

Two path qubits form the meter, one per subsystem; the bipartite system
carries the state being measured. The joint space is laid out with factor
order (meter_A, meter_B, system_A, system_B); meter basis is up=0, down=1.

The meter starts in (|ud> + eps |du>)/sqrt(1+eps^2). A controlled phase
couples meter and system: the A side applies exp(-i*g*P_j) to system A on
the meter-A |down> component, the B side applies exp(-i*g*P_l) to system B
on the meter-B |up> component. After postselecting the system, the meter
is read out against two detector states whose probabilities carry the real
and imaginary parts of the relevant modular value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import OrthogonalPostselection
from .hilbert import (
    DEFAULT_TOL,
    LinearOperator,
    PureState,
    Tolerances,
    apply,
    basis_state,
    exp_projector_phase,
    identity,
    inner,
    normalize,
    partial_inner,
    projector,
    tensor,
)

UP, DOWN = 0, 1
METER_DIMS = (2, 2)
# joint meter basis indices: |ud> is the reference component, |du> the signal
IDX_UP_DOWN = 1
IDX_DOWN_UP = 2

InteractionKind = Literal["pair", "single_a", "single_b"]
MeterMode = Literal["entangled", "product"]

_KINDS = ("pair", "single_a", "single_b")
_MODES = ("entangled", "product")


@dataclass(frozen=True)
class ProtocolConfig:
    """One measurement configuration: states, coupling, and meter choice.

    ``g`` defaults to pi so the s-parameter e^{-ig}-1 equals -2; epsilon is
    the meter asymmetry (0.2 in the reference setting).
    """

    system_state: PureState
    postselection: PureState
    epsilon: float = 0.2
    g: float = math.pi
    meter_mode: MeterMode = "entangled"
    ortho_tol: float = DEFAULT_TOL.orthogonal
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        if len(self.system_state.dims) != 2:
            raise ValueError("system state must have exactly two factors")
        if self.postselection.dims != self.system_state.dims:
            raise ValueError("postselection dims must match the system state")
        for name, state in (("system_state", self.system_state),
                            ("postselection", self.postselection)):
            if abs(state.norm() - 1.0) > self.tol.structural:
                raise ValueError(f"{name} must be normalized")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.meter_mode not in _MODES:
            raise ValueError(f"unknown meter mode {self.meter_mode!r}")

    @property
    def dims(self) -> tuple[int, int]:
        m, n = self.system_state.dims
        return (m, n)


@dataclass(frozen=True)
class MeterOutcome:
    """Conditional meter state and detector probabilities for one setting.

    p1/p2 come from the entangled detectors (|ud>+|du>)/sqrt2 and
    (|ud>+i|du>)/sqrt2; p1_tilde/p2_tilde from the half-rate product
    detectors and satisfy p_tilde = p/2 exactly.
    """

    conditional_meter_state: PureState
    postselection_probability: float
    p1: float
    p2: float
    p1_tilde: float
    p2_tilde: float


def prepare_meter(epsilon: float) -> PureState:
    """Initial two-part meter (|ud> + eps |du>)/sqrt(1+eps^2)."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    amps = np.zeros(4, dtype=np.complex128)
    scale = 1.0 / math.sqrt(1.0 + epsilon * epsilon)
    amps[IDX_UP_DOWN] = scale
    amps[IDX_DOWN_UP] = epsilon * scale
    return PureState(METER_DIMS, amps)


def _meter_side_projector(side: Literal["a", "b"]) -> LinearOperator:
    # A couples on its |down> component, B on its |up> component
    level = DOWN if side == "a" else UP
    return projector((2,), level)


def build_interaction(kind: InteractionKind, j: int | None, l: int | None,
                      g: float, dims) -> LinearOperator:
    """Controlled-phase unitary on the joint meter (x) system space.

    kind="single_a" couples meter A to system-A projector |j><j| only,
    kind="single_b" couples meter B to system-B projector |l><l| only,
    kind="pair" applies both (the two controlled phases commute).
    """
    m, n = (int(d) for d in dims)
    if kind not in _KINDS:
        raise ValueError(f"unknown interaction kind {kind!r}")
    use_a = kind in ("pair", "single_a")
    use_b = kind in ("pair", "single_b")
    if use_a:
        if j is None or not 0 <= j < m:
            raise ValueError(f"system-A index {j} out of range for dimension {m}")
    if use_b:
        if l is None or not 0 <= l < n:
            raise ValueError(f"system-B index {l} out of range for dimension {n}")

    mat = None
    if use_a:
        q_a = tensor(tensor(_meter_side_projector("a"), identity((2,))),
                     tensor(projector((m,), j), identity((n,))))
        mat = exp_projector_phase(q_a, g).mat
    if use_b:
        q_b = tensor(tensor(identity((2,)), _meter_side_projector("b")),
                     tensor(identity((m,)), projector((n,), l)))
        exp_b = exp_projector_phase(q_b, g).mat
        mat = exp_b if mat is None else mat @ exp_b
    return LinearOperator((2, 2, m, n), mat)


def _single_part_detector(ref: int, phase: complex) -> np.ndarray:
    vec = np.zeros(2, dtype=np.complex128)
    vec[ref] = 1.0
    vec[1 - ref] = phase
    return vec / math.sqrt(2.0)


def _detectors(kind: InteractionKind, mode: MeterMode):
    """Joint detector states: (d1, d2, tilde1, tilde2) on the meter space.

    d1/d2 live on the (reference, signal) pair of joint components; the
    tilde detectors are full product states (half the projection rate). The
    i-phase factor of tilde2 sits on the meter part that carries the signal
    (part A for the entangled meter and A-side runs, part B for B-side runs
    in product mode).
    """
    if mode == "entangled":
        ref_idx, sig_idx = IDX_UP_DOWN, IDX_DOWN_UP
        phase_side = "a"
    elif kind == "single_a":
        ref_idx, sig_idx = IDX_UP_DOWN, 3  # |ud> -> |dd>, spectator B parked at down
        phase_side = "a"
    else:  # product, single_b
        ref_idx, sig_idx = IDX_UP_DOWN, 0  # |ud> -> |uu>, spectator A parked at up
        phase_side = "b"

    def pair_detector(phase: complex) -> PureState:
        amps = np.zeros(4, dtype=np.complex128)
        amps[ref_idx] = 1.0 / math.sqrt(2.0)
        amps[sig_idx] = phase / math.sqrt(2.0)
        return PureState(METER_DIMS, amps)

    uniform = np.ones(2, dtype=np.complex128) / math.sqrt(2.0)
    # per-part reference levels: A rests at up, B rests at down
    quad_a = _single_part_detector(UP, 1j) if phase_side == "a" else uniform
    quad_b = _single_part_detector(DOWN, 1j) if phase_side == "b" else uniform
    tilde1 = PureState(METER_DIMS, np.kron(uniform, uniform))
    tilde2 = PureState(METER_DIMS, np.kron(quad_a, quad_b))
    return pair_detector(1.0), pair_detector(1j), tilde1, tilde2


def _initial_meter(cfg: ProtocolConfig, kind: InteractionKind) -> PureState:
    if cfg.meter_mode == "entangled":
        return prepare_meter(cfg.epsilon)
    if kind == "pair":
        raise ValueError("pair settings require the entangled meter mode")
    scale = 1.0 / math.sqrt(1.0 + cfg.epsilon**2)
    if kind == "single_a":
        part_a = PureState((2,), np.array([scale, cfg.epsilon * scale]))
        part_b = basis_state((2,), DOWN)
    else:
        part_a = basis_state((2,), UP)
        part_b = PureState((2,), np.array([cfg.epsilon * scale, scale]))
    return tensor(part_a, part_b)


def run_protocol(cfg: ProtocolConfig, kind: InteractionKind,
                 j: int | None = None, l: int | None = None) -> MeterOutcome:
    """Run one setting end to end and read out the meter.

    Builds the dense interaction unitary, applies it to meter (x) system,
    postselects the system, and projects the conditional meter state onto
    the detector states. Raises OrthogonalPostselection when the overlap
    |<postselection|system>| falls below ortho_tol (the modular value
    diverges there and no meter readout is meaningful).
    """
    overlap = inner(cfg.postselection, cfg.system_state)
    if abs(overlap) < cfg.ortho_tol:
        raise OrthogonalPostselection(
            f"|<postselection|state>| = {abs(overlap):.3e} < {cfg.ortho_tol:.3e}"
        )
    meter0 = _initial_meter(cfg, kind)
    joint = tensor(meter0, cfg.system_state)
    unitary = build_interaction(kind, j, l, cfg.g, cfg.dims)
    final = apply(unitary, joint)
    meter_proj = partial_inner(cfg.postselection, final)
    prob = meter_proj.norm() ** 2
    conditional = normalize(meter_proj)

    d1, d2, t1, t2 = _detectors(kind, cfg.meter_mode)
    p1 = abs(inner(d1, conditional)) ** 2
    p2 = abs(inner(d2, conditional)) ** 2
    p1_tilde = abs(inner(t1, conditional)) ** 2
    p2_tilde = abs(inner(t2, conditional)) ** 2
    return MeterOutcome(
        conditional_meter_state=conditional,
        postselection_probability=prob,
        p1=p1, p2=p2, p1_tilde=p1_tilde, p2_tilde=p2_tilde,
    )
