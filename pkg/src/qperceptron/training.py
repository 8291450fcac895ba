"""Full-batch gradient-descent training of perceptron networks.

The forward model for each output j is y_j = f(x_j) with x_j the neural
potential of perceptron j evaluated on the encoded input row.  Quantum runs
encode inputs as spins (+1/-1), classical runs as raw bits (0/1).  The cost
is the mean squared error with a global 1/2 factor,

    C = 1 / (2 N k) * sum_n sum_j (y_j - t_j)^2,

whose exact parameter gradient is (1 / (N k)) * sum (y - t) f'(x) * feature,
where the feature is the input value for a linear weight, the product of
input values for a multi-qubit weight, and -1 for the bias.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from .core import (
    InvalidInputError,
    MultiQubitTerm,
    NeuralPotential,
    SpinConfig,
    activation,
    activation_derivative,
    evaluate_potential,
)

__all__ = [
    "TrainingExample",
    "TrainerConfig",
    "PotentialGradient",
    "TrainedNetwork",
    "CostCurve",
    "forward_network",
    "cost",
    "quantum_gradients",
    "classical_gradients",
    "epoch_update",
    "train",
    "detect_plateau",
    "initialize_network",
]

Encoding = Literal["spin", "bit"]


@dataclass(frozen=True)
class TrainingExample:
    """One truth-table row: an input configuration and its target bits."""

    spins: SpinConfig
    target: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.target) == 0:
            raise InvalidInputError("target must have at least one output bit")
        if any(t not in (0, 1) for t in self.target):
            raise InvalidInputError(f"targets must be 0 or 1, got {self.target}")
        object.__setattr__(self, "target", tuple(int(t) for t in self.target))

    @property
    def bits(self) -> tuple[int, ...]:
        return self.spins.bits


@dataclass(frozen=True)
class TrainerConfig:
    """Gradient-descent hyperparameters and stopping rules."""

    eta: float = 1.5
    max_epochs: int = 5000
    cost_tolerance: float = 0.01
    init_range: float = 0.5
    seed: int = 0
    plateau_window: int = 200
    plateau_epsilon: float = 5e-4

    def __post_init__(self) -> None:
        if not (self.eta >= 0.0 and np.isfinite(self.eta)):
            raise InvalidInputError("eta must be a finite non-negative real")
        if self.max_epochs < 1:
            raise InvalidInputError("max_epochs must be at least 1")
        if not (self.cost_tolerance > 0.0):
            raise InvalidInputError("cost_tolerance must be positive")
        if not (self.init_range >= 0.0 and np.isfinite(self.init_range)):
            raise InvalidInputError("init_range must be a finite non-negative real")
        if self.plateau_window < 2:
            raise InvalidInputError("plateau_window must be at least 2")
        if not (self.plateau_epsilon > 0.0):
            raise InvalidInputError("plateau_epsilon must be positive")


@dataclass(frozen=True)
class PotentialGradient:
    """Cost gradient with the same layout as a NeuralPotential."""

    linear: np.ndarray
    multi: np.ndarray
    bias: float


@dataclass(frozen=True)
class TrainedNetwork:
    """One perceptron per output, all sharing the same input arity."""

    perceptrons: tuple[NeuralPotential, ...]
    arity: int
    task_name: str = ""
    seed: int | None = None
    epochs_run: int = 0

    def __post_init__(self) -> None:
        if len(self.perceptrons) == 0:
            raise InvalidInputError("network needs at least one perceptron")
        if any(p.arity != self.arity for p in self.perceptrons):
            raise InvalidInputError("all perceptrons must share the network arity")
        object.__setattr__(self, "perceptrons", tuple(self.perceptrons))

    @property
    def n_outputs(self) -> int:
        return len(self.perceptrons)


@dataclass
class CostCurve:
    """Per-epoch cost trace; epoch e corresponds to costs[e - 1]."""

    costs: np.ndarray
    cost_tolerance: float
    epochs_to_tolerance: int | None = None
    plateau_value: float | None = None


def _validate_set(
    net: TrainedNetwork, training_set: Sequence[TrainingExample]
) -> None:
    if len(training_set) == 0:
        raise InvalidInputError("training set must not be empty")
    for ex in training_set:
        if len(ex.spins) != net.arity:
            raise InvalidInputError("training input arity does not match network")
        if len(ex.target) != net.n_outputs:
            raise InvalidInputError("target width does not match network outputs")


def _input_matrix(
    training_set: Sequence[TrainingExample], encoding: Encoding
) -> np.ndarray:
    if encoding == "spin":
        return np.array([ex.spins.spins for ex in training_set], dtype=float)
    if encoding == "bit":
        return np.array([ex.bits for ex in training_set], dtype=float)
    raise InvalidInputError(f"unknown encoding {encoding!r}")


def _design_matrix(p: NeuralPotential, inputs: np.ndarray) -> np.ndarray:
    """Columns: each input value, each term product, then the constant -1."""
    cols = [inputs[:, i] for i in range(p.arity)]
    for term in p.multi_terms:
        prod = np.ones(inputs.shape[0])
        for i in term.indices:
            prod = prod * inputs[:, i - 1]
        cols.append(prod)
    cols.append(-np.ones(inputs.shape[0]))
    return np.column_stack(cols)


def _pack(p: NeuralPotential) -> np.ndarray:
    return np.array(
        list(p.linear_weights) + [t.weight for t in p.multi_terms] + [p.bias]
    )


def _unpack(p: NeuralPotential, theta: np.ndarray) -> NeuralPotential:
    k = p.arity
    terms = tuple(
        MultiQubitTerm(t.indices, float(theta[k + m]))
        for m, t in enumerate(p.multi_terms)
    )
    return NeuralPotential(tuple(float(v) for v in theta[:k]), float(theta[-1]), terms)


class _Workspace:
    """Precomputed design matrices and packed parameters for one network."""

    def __init__(
        self,
        net: TrainedNetwork,
        training_set: Sequence[TrainingExample],
        encoding: Encoding,
    ) -> None:
        _validate_set(net, training_set)
        inputs = _input_matrix(training_set, encoding)
        self.net = net
        self.n_examples = len(training_set)
        self.n_outputs = net.n_outputs
        self.designs = [_design_matrix(p, inputs) for p in net.perceptrons]
        self.thetas = [_pack(p) for p in net.perceptrons]
        self.targets = np.array([ex.target for ex in training_set], dtype=float)

    def cost(self) -> float:
        total = 0.0
        for j in range(self.n_outputs):
            err = activation(self.designs[j] @ self.thetas[j]) - self.targets[:, j]
            total += float(err @ err)
        return total / (2.0 * self.n_examples * self.n_outputs)

    def gradients(self) -> list[np.ndarray]:
        scale = 1.0 / (self.n_examples * self.n_outputs)
        grads = []
        for j in range(self.n_outputs):
            x = self.designs[j] @ self.thetas[j]
            err = activation(x) - self.targets[:, j]
            grads.append(scale * (self.designs[j].T @ (err * activation_derivative(x))))
        return grads

    def step(self, eta: float) -> None:
        grads = self.gradients()
        for j in range(self.n_outputs):
            self.thetas[j] = self.thetas[j] - eta * grads[j]

    def network(self, epochs_run: int | None = None) -> TrainedNetwork:
        perceptrons = tuple(
            _unpack(p, th) for p, th in zip(self.net.perceptrons, self.thetas)
        )
        return replace(
            self.net,
            perceptrons=perceptrons,
            epochs_run=self.net.epochs_run if epochs_run is None else epochs_run,
        )


def forward_network(
    net: TrainedNetwork, s: SpinConfig, encoding: Encoding = "spin"
) -> np.ndarray:
    """Output vector y = f(x_j) for one input configuration."""
    if len(s) != net.arity:
        raise InvalidInputError("input arity does not match network")
    if encoding == "spin":
        xs = [evaluate_potential(p, s) for p in net.perceptrons]
    elif encoding == "bit":
        row = np.array([s.bits], dtype=float)
        xs = [float(_design_matrix(p, row)[0] @ _pack(p)) for p in net.perceptrons]
    else:
        raise InvalidInputError(f"unknown encoding {encoding!r}")
    return np.array([activation(x) for x in xs])


def cost(
    net: TrainedNetwork,
    training_set: Sequence[TrainingExample],
    encoding: Encoding = "spin",
) -> float:
    """Mean squared error with the 1 / (2 N k) normalization."""
    return _Workspace(net, training_set, encoding).cost()


def quantum_gradients(
    net: TrainedNetwork, training_set: Sequence[TrainingExample]
) -> tuple[PotentialGradient, ...]:
    """Exact cost gradients for every perceptron under the spin encoding."""
    ws = _Workspace(net, training_set, "spin")
    return _structure_gradients(net, ws.gradients())


def classical_gradients(
    p: NeuralPotential, training_set: Sequence[TrainingExample]
) -> PotentialGradient:
    """Exact cost gradient of a single perceptron under the bit encoding."""
    net = TrainedNetwork((p,), p.arity)
    ws = _Workspace(net, training_set, "bit")
    return _structure_gradients(net, ws.gradients())[0]


def _structure_gradients(
    net: TrainedNetwork, flat: list[np.ndarray]
) -> tuple[PotentialGradient, ...]:
    out = []
    for p, g in zip(net.perceptrons, flat):
        k = p.arity
        m = len(p.multi_terms)
        out.append(
            PotentialGradient(
                linear=g[:k].copy(), multi=g[k : k + m].copy(), bias=float(g[-1])
            )
        )
    return tuple(out)


def epoch_update(
    net: TrainedNetwork,
    training_set: Sequence[TrainingExample],
    config: TrainerConfig,
    encoding: Encoding = "spin",
) -> TrainedNetwork:
    """One full-batch update: every parameter moves against its gradient."""
    ws = _Workspace(net, training_set, encoding)
    ws.step(config.eta)
    return ws.network()


def train(
    net: TrainedNetwork,
    training_set: Sequence[TrainingExample],
    config: TrainerConfig,
    encoding: Encoding = "spin",
) -> tuple[TrainedNetwork, CostCurve]:
    """Run full-batch epochs until the cost tolerance or the epoch budget.

    The cost recorded for epoch e is evaluated after the e-th update, so
    epochs_to_tolerance counts the updates needed to cross the tolerance.
    """
    ws = _Workspace(net, training_set, encoding)
    costs = np.empty(config.max_epochs)
    epochs_to_tolerance: int | None = None
    ran = 0
    for e in range(config.max_epochs):
        ws.step(config.eta)
        c = ws.cost()
        costs[e] = c
        ran = e + 1
        if c < config.cost_tolerance:
            epochs_to_tolerance = ran
            break
    curve = CostCurve(
        costs=costs[:ran].copy(),
        cost_tolerance=config.cost_tolerance,
        epochs_to_tolerance=epochs_to_tolerance,
    )
    return ws.network(epochs_run=net.epochs_run + ran), curve


def detect_plateau(curve: CostCurve, config: TrainerConfig) -> float | None:
    """Mean of the trailing window when its spread is below plateau_epsilon."""
    if len(curve.costs) <= config.plateau_window:
        raise InvalidInputError(
            f"curve of {len(curve.costs)} epochs is too short for window "
            f"{config.plateau_window}"
        )
    window = curve.costs[-config.plateau_window :]
    if float(window.max() - window.min()) < config.plateau_epsilon:
        return float(window.mean())
    return None


def initialize_network(
    arity: int,
    templates: Sequence[Sequence[tuple[int, ...]]],
    config: TrainerConfig,
    task_name: str = "",
) -> TrainedNetwork:
    """Draw every weight uniformly from [-init_range, init_range].

    templates[j] lists the multi-qubit index tuples of perceptron j.  Draw
    order is fixed per perceptron: linear weights, term weights, bias.
    """
    rng = np.random.default_rng(config.seed)
    r = config.init_range
    perceptrons = []
    for terms in templates:
        linear = tuple(float(v) for v in rng.uniform(-r, r, arity))
        multi = tuple(
            MultiQubitTerm(tuple(t), float(rng.uniform(-r, r))) for t in terms
        )
        bias = float(rng.uniform(-r, r))
        perceptrons.append(NeuralPotential(linear, bias, multi))
    return TrainedNetwork(
        tuple(perceptrons), arity, task_name=task_name, seed=config.seed
    )
