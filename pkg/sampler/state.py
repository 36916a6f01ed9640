"""State of the slice Gibbs sampler."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from errors import SamplerFault


def stick_weights(sticks: NDArray[np.float64]) -> NDArray[np.float64]:
    """pi_a = V_a prod_{l<a} (1 - V_l)."""
    remaining = np.concatenate([[1.0], np.cumprod(1.0 - sticks)[:-1]])
    return sticks * remaining


@dataclass(frozen=True, eq=False)
class SamplerState:
    """One point of the chain.

    `sticks` holds the materialized V_1..V_L; `probs[j]` is the (L, k_j) table of item
    j; `labels` are 0-based class assignments and `slices` the auxiliary u_i.
    """

    sticks: NDArray[np.float64]
    probs: tuple[NDArray[np.float64], ...]
    labels: NDArray[np.int_]
    slices: NDArray[np.float64]
    beta: float

    @property
    def n_sticks(self) -> int:
        return self.sticks.size

    @property
    def weights(self) -> NDArray[np.float64]:
        return stick_weights(self.sticks)

    @property
    def leftover(self) -> float:
        """Mass not yet assigned to a materialized stick."""
        return float(np.prod(1.0 - self.sticks))

    @property
    def n_active(self) -> int:
        """M_active: one past the largest occupied class (at least 1)."""
        return int(self.labels.max()) + 1 if self.labels.size else 1

    def check_invariants(self, iteration: int | None = None) -> None:
        """Raise SamplerFault if the stick, slice or probability constraints are broken."""
        problems = []
        if not np.all((self.sticks > 0) & (self.sticks < 1)):
            problems.append("stick outside (0, 1)")
        if any(p.shape[0] != self.n_sticks for p in self.probs):
            problems.append("probability tables do not match the stick count")
        for j, p in enumerate(self.probs):
            if p.min(initial=0.0) < 0 or np.abs(p.sum(axis=1) - 1.0).max(initial=0.0) > 1e-10:
                problems.append(f"item {j + 1} has an invalid categorical distribution")
        if self.labels.size:
            if self.labels.max() >= self.n_sticks:
                problems.append("label beyond the materialized sticks")
            else:
                pi = self.weights[self.labels]
                if not np.all((self.slices > 0) & (self.slices < pi)):
                    problems.append("slice variable outside (0, pi_{alpha_i})")
        if problems:
            raise SamplerFault(
                "; ".join(problems),
                iteration=iteration,
                diagnostic={"sticks": self.n_sticks, "beta": self.beta, "problems": problems},
            )


def class_membership(state: SamplerState) -> NDArray[np.int_]:
    """Respondent counts per materialized class in `state`."""
    return np.bincount(state.labels, minlength=state.n_sticks)
