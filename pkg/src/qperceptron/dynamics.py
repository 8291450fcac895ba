"""Two-level adiabatic activation dynamics and a small statevector engine.

The activation of one perceptron qubit is produced physically by evolving
H(t) = (x * sz + Omega(t) * sx) / 2 from the transverse ground configuration
while the drive Omega ramps down linearly.  Here sz is diagonal with
sz|0> = -|0> and sz|1> = +|1>, matching the bit-to-spin map in `core`, so
the excited-state population at the end of the ramp approaches the
activation value f(x / Omega(t_f)).

Statevector indexing: qubit 1 is the most significant bit of the basis
index, consistent with the MSB-first integer convention of `core`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    InvalidInputError,
    NeuralPotential,
    SpinConfig,
    activation,
    evaluate_potential,
)

__all__ = [
    "InvalidWiringError",
    "ScheduleTooFastError",
    "IntegratorError",
    "AdiabaticSchedule",
    "AdiabaticProfile",
    "default_schedule",
    "hamiltonian",
    "instantaneous_upper_eigenstate",
    "adiabatic_evolve",
    "adiabatic_profile",
    "Statevector",
    "zero_state",
    "basis_state",
    "apply_hadamard",
    "prepare_superposition",
    "apply_perceptron_gate",
    "apply_network",
    "excitation_probability",
    "forward_statevector",
]

NORM_TOL = 1e-12
DRIFT_ABORT = 1e-6


class InvalidWiringError(ValueError):
    """A gate or network references qubits inconsistently."""


class ScheduleTooFastError(ValueError):
    """The ramp starts with too small a drive for the requested potential."""


class IntegratorError(RuntimeError):
    """The propagator lost unitarity beyond the abort threshold."""


@dataclass(frozen=True)
class AdiabaticSchedule:
    """Linear ramp of the transverse drive from omega_start down to omega_end."""

    omega_start: float
    omega_end: float = 1.0
    t_f: float = 200.0
    dt: float = 1e-3
    ramp: str = "linear"

    def __post_init__(self) -> None:
        if self.ramp != "linear":
            raise InvalidInputError(f"unsupported ramp shape {self.ramp!r}")
        if not (self.omega_end > 0.0 and np.isfinite(self.omega_end)):
            raise InvalidInputError("omega_end must be a positive real")
        if not (self.omega_start >= self.omega_end and np.isfinite(self.omega_start)):
            raise InvalidInputError("omega_start must be >= omega_end")
        if not (self.t_f > 0.0 and np.isfinite(self.t_f)):
            raise InvalidInputError("t_f must be a positive real")
        if not (0.0 < self.dt <= self.t_f / 1000.0):
            raise InvalidInputError("dt must satisfy 0 < dt <= t_f / 1000")

    def omega(self, t: float) -> float:
        return self.omega_start + (self.omega_end - self.omega_start) * t / self.t_f


def default_schedule(x: float) -> AdiabaticSchedule:
    """Default ramp for potential value x: start at 50 * max(1, |x|), end at 1."""
    return AdiabaticSchedule(omega_start=50.0 * max(1.0, abs(float(x))))


def hamiltonian(x: float, omega: float) -> np.ndarray:
    """The 2x2 generator (x * sz + omega * sx) / 2 with sz = diag(-1, +1)."""
    return 0.5 * np.array([[-x, omega], [omega, x]], dtype=complex)


def instantaneous_upper_eigenstate(x: float, omega: float) -> tuple[float, float]:
    """Amplitudes (sqrt(1 - f(x/omega)), sqrt(f(x/omega))) of the upper branch.

    This is the eigenvector of hamiltonian(x, omega) with eigenvalue
    +sqrt(x^2 + omega^2) / 2; at x = 0 it reduces to the equal superposition.
    """
    if omega <= 0.0:
        raise InvalidInputError("omega must be positive")
    p = activation(x / omega)
    return (float(np.sqrt(1.0 - p)), float(np.sqrt(p)))


def _propagate_grid(
    xs: np.ndarray, omega_starts: np.ndarray, omega_end: float, t_f: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Evolve |+> under each (x, ramp) pair; return final P(excited) and norm drift.

    Each step applies the exact unitary of the midpoint Hamiltonian, so the
    propagation preserves the norm to rounding error by construction.  Steps
    are combined by pairwise products in blocks, which is associative up to
    rounding and keeps the evaluation fully deterministic.
    """
    xs = np.asarray(xs, dtype=float)
    omega_starts = np.asarray(omega_starts, dtype=float)
    n_steps = max(1, int(round(t_f / dt)))
    step = t_f / n_steps
    g = xs.shape[0]
    total: np.ndarray | None = None
    block = 1 << 14
    for start in range(0, n_steps, block):
        stop = min(start + block, n_steps)
        mid = (np.arange(start, stop) + 0.5) * step
        om = omega_starts[None, :] + (omega_end - omega_starts[None, :]) * mid[:, None] / t_f
        energy = 0.5 * np.sqrt(xs[None, :] ** 2 + om**2)
        c = np.cos(energy * step)
        s = np.sin(energy * step) / energy
        u = np.empty((stop - start, g, 2, 2), dtype=complex)
        u[..., 0, 0] = c + 0.5j * s * xs[None, :]
        u[..., 0, 1] = -0.5j * s * om
        u[..., 1, 0] = -0.5j * s * om
        u[..., 1, 1] = c - 0.5j * s * xs[None, :]
        while u.shape[0] > 1:
            if u.shape[0] % 2:
                tail = u[-1:]
                u = np.concatenate([np.matmul(u[1:-1:2], u[0:-1:2]), tail])
            else:
                u = np.matmul(u[1::2], u[0::2])
        total = u[0] if total is None else np.matmul(u[0], total)
    psi0 = np.full((g, 2), 1.0 / np.sqrt(2.0), dtype=complex)
    psi = np.einsum("gij,gj->gi", total, psi0)
    probs = np.abs(psi[:, 1]) ** 2
    drift = np.abs(np.sqrt(np.sum(np.abs(psi) ** 2, axis=1)) - 1.0)
    return probs, drift


def adiabatic_evolve(x: float, schedule: AdiabaticSchedule | None = None) -> float:
    """Excited-state population after ramping the drive down on potential x.

    Starts from the equal superposition (the upper dressed state at large
    drive) and follows the upper branch; the result approaches
    f(x / omega_end) for slow ramps.  Requires |x| <= omega_start / 10 so the
    starting state is close to the instantaneous eigenstate.
    """
    x = float(x)
    if not np.isfinite(x):
        raise InvalidInputError("potential value must be finite")
    sched = default_schedule(x) if schedule is None else schedule
    if abs(x) > sched.omega_start / 10.0:
        raise ScheduleTooFastError(
            f"|x| = {abs(x)} exceeds omega_start / 10 = {sched.omega_start / 10.0}"
        )
    probs, drift = _propagate_grid(
        np.array([x]), np.array([sched.omega_start]), sched.omega_end, sched.t_f, sched.dt
    )
    if drift[0] > DRIFT_ABORT:
        raise IntegratorError(f"norm drift {drift[0]:.3e} exceeds {DRIFT_ABORT}")
    return float(probs[0])


@dataclass(frozen=True)
class AdiabaticProfile:
    """Ramp outcomes over a grid of potential values."""

    xs: tuple[float, ...]
    probabilities: tuple[float, ...]
    targets: tuple[float, ...]
    errors: tuple[float, ...]
    max_error: float
    mean_error: float
    max_drift: float


def adiabatic_profile(
    xs: Sequence[float],
    t_f: float = 200.0,
    dt: float = 1e-3,
    omega_start_factor: float = 50.0,
    omega_end: float = 1.0,
) -> AdiabaticProfile:
    """Run the default-style ramp on each x and compare P against f(x / omega_end)."""
    grid = np.asarray(list(xs), dtype=float)
    if grid.size == 0:
        raise InvalidInputError("empty x grid")
    if not np.all(np.isfinite(grid)):
        raise InvalidInputError("x grid must be finite")
    starts = omega_start_factor * np.maximum(1.0, np.abs(grid))
    if np.any(np.abs(grid) > starts / 10.0):
        raise ScheduleTooFastError("omega_start_factor below the slow-start bound 10")
    AdiabaticSchedule(float(starts.max()), omega_end, t_f, dt)  # validate ranges
    probs, drift = _propagate_grid(grid, starts, omega_end, t_f, dt)
    if np.any(drift > DRIFT_ABORT):
        raise IntegratorError(f"norm drift {drift.max():.3e} exceeds {DRIFT_ABORT}")
    targets = activation(grid / omega_end)
    errors = np.abs(probs - targets)
    return AdiabaticProfile(
        xs=tuple(float(v) for v in grid),
        probabilities=tuple(float(v) for v in probs),
        targets=tuple(float(v) for v in np.atleast_1d(targets)),
        errors=tuple(float(v) for v in errors),
        max_error=float(errors.max()),
        mean_error=float(errors.mean()),
        max_drift=float(drift.max()),
    )


@dataclass
class Statevector:
    """Dense complex amplitudes over n qubits, qubit 1 most significant."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.n < 1 or self.amplitudes.shape != (2**self.n,):
            raise InvalidInputError(
                f"amplitude vector of length {self.amplitudes.shape} does not match n={self.n}"
            )

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.n)


def zero_state(n: int) -> Statevector:
    """|0...0> on n qubits."""
    if n < 1:
        raise InvalidInputError("need at least one qubit")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return Statevector(amps, n)


def basis_state(n: int, bits: Sequence[int]) -> Statevector:
    """Computational basis state for an MSB-first bit string."""
    if len(bits) != n:
        raise InvalidInputError(f"expected {n} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise InvalidInputError("bits must be 0 or 1")
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    amps = np.zeros(2**n, dtype=complex)
    amps[idx] = 1.0
    return Statevector(amps, n)


def _check_qubit(state: Statevector, j: int) -> None:
    if not 1 <= j <= state.n:
        raise InvalidWiringError(f"qubit {j} outside register 1..{state.n}")


def _check_norm(state: Statevector) -> Statevector:
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise IntegratorError(f"state norm drifted to {state.norm()!r}")
    return state


def apply_hadamard(state: Statevector, j: int) -> Statevector:
    """Hadamard on qubit j (an involution)."""
    _check_qubit(state, j)
    t = state.amplitudes.reshape([2] * state.n)
    axis = j - 1
    a0 = np.take(t, 0, axis=axis)
    a1 = np.take(t, 1, axis=axis)
    r = 1.0 / np.sqrt(2.0)
    new = np.stack([(a0 + a1) * r, (a0 - a1) * r], axis=axis)
    return _check_norm(Statevector(new.reshape(-1), state.n))


def prepare_superposition(n: int, j: int) -> Statevector:
    """All-zero register with qubit j rotated to the equal superposition."""
    return apply_hadamard(zero_state(n), j)


def excitation_probability(state: Statevector, j: int) -> float:
    """Marginal probability that qubit j reads 1."""
    _check_qubit(state, j)
    t = state.amplitudes.reshape([2] * state.n)
    a1 = np.take(t, 1, axis=j - 1)
    return float(np.sum(np.abs(a1) ** 2))


def apply_perceptron_gate(
    state: Statevector,
    p: NeuralPotential,
    target: int,
    strict: bool = False,
) -> Statevector:
    """Rotate the target qubit conditioned on input qubits 1..p.arity.

    For each input basis configuration with potential value x, the target
    sees the rotation that maps |0> to sqrt(1 - f(x)) |0> + sqrt(f(x)) |1>,
    completed as a real rotation (angle 2 * arcsin(sqrt(f(x)))).  With
    strict=True the target must start indistinguishable from |0>.
    """
    _check_qubit(state, target)
    if target <= p.arity:
        raise InvalidWiringError(
            f"target qubit {target} is among the input qubits 1..{p.arity}"
        )
    if p.arity >= state.n:
        raise InvalidWiringError(
            f"potential arity {p.arity} does not fit register of {state.n} qubits"
        )
    if strict and excitation_probability(state, target) > 1e-9:
        raise InvalidWiringError("strict mode requires the target qubit in |0>")

    k = p.arity
    t = state.amplitudes.reshape([2] * state.n)
    # Potential value for every input configuration, indexed by input bits.
    shape_in = [2] * k
    x = np.zeros(shape_in)
    for idx in np.ndindex(*shape_in):
        s = SpinConfig(tuple(2 * b - 1 for b in idx))
        x[idx] = evaluate_potential(p, s)
    prob = activation(x)
    cos_half = np.sqrt(1.0 - prob)
    sin_half = np.sqrt(prob)
    # Broadcast rotation coefficients over the non-input, non-target axes.
    bshape = [2] * k + [1] * (state.n - k)
    cos_half = cos_half.reshape(bshape)
    sin_half = sin_half.reshape(bshape)
    axis = target - 1
    a0 = np.take(t, 0, axis=axis)
    a1 = np.take(t, 1, axis=axis)
    c0 = np.squeeze(cos_half, axis=axis)
    s0 = np.squeeze(sin_half, axis=axis)
    new0 = c0 * a0 - s0 * a1
    new1 = s0 * a0 + c0 * a1
    new = np.stack([new0, new1], axis=axis)
    return _check_norm(Statevector(new.reshape(-1), state.n))


def apply_network(
    state: Statevector, wiring: Sequence[tuple[NeuralPotential, int]]
) -> Statevector:
    """Apply perceptron gates in order; target qubits must be distinct."""
    targets = [t for _, t in wiring]
    if len(set(targets)) != len(targets):
        raise InvalidWiringError(f"duplicate target qubits in {targets}")
    out = state
    for p, target in wiring:
        out = apply_perceptron_gate(out, p, target)
    return out


def forward_statevector(
    potentials: Sequence[NeuralPotential], s: SpinConfig
) -> np.ndarray:
    """Network outputs via full statevector evolution on one basis input.

    Builds a register of k input qubits prepared in the basis state of s plus
    one fresh |0> target per potential, applies every perceptron gate, and
    reads out the excitation probability of each target.
    """
    if not potentials:
        raise InvalidInputError("need at least one potential")
    k = len(s)
    if any(p.arity != k for p in potentials):
        raise InvalidInputError("every potential must match the input arity")
    n = k + len(potentials)
    state = basis_state(n, s.bits + (0,) * len(potentials))
    wiring = [(p, k + 1 + j) for j, p in enumerate(potentials)]
    state = apply_network(state, wiring)
    return np.array(
        [excitation_probability(state, k + 1 + j) for j in range(len(potentials))]
    )
