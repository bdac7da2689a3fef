"""Exponent-improvement recursions and the dimension gate table.

One step lifts the weighted-moment exponent phi by two (capped by the
model's ceiling) minus a small eps; iterating from phi_0 = 2 saturates at
d-2-eps (saw), d-4-eps (percolation) or d-6-eps (trees/animals).  The
verdict compares the terminal weight exponent against the model's decay
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

__all__ = ["BootstrapTrace", "run_bootstrap", "gate_table", "MODELS"]


MODELS = {
    "saw": {
        "phi_cap": lambda d: d - 2,
        "gamma_cap": lambda d: d - 4,
        "threshold": lambda d: (d + 2) / 3,
        "rho": lambda d: 2 * (d - 4),
        "weight_beta": 0.0,  # the recursion fixes alpha = 2 and varies gamma
    },
    "percolation": {
        "phi_cap": lambda d: d - 4,
        "gamma_cap": lambda d: d - 6,
        "threshold": lambda d: (d + 2) / 2,
        "rho": lambda d: d - 6,
        "weight_beta": 2.0,
    },
    "ltla": {
        "phi_cap": lambda d: d - 6,
        "gamma_cap": lambda d: d - 8,
        "threshold": lambda d: (3 * d + 2) / 4,
        "rho": lambda d: d - 10,
        "weight_beta": 2.0,
    },
}


@dataclass
class BootstrapTrace:
    model: str
    d: int
    eps: float
    steps: list  # (i, lead_weight, gamma_i, phi_i)
    terminal_alpha: float
    threshold: float
    verdict: str
    rho: float
    warnings: list = dc_field(default_factory=list)


def run_bootstrap(model: str, d: int, eps: float, max_iter: int = 200) -> BootstrapTrace:
    """Iterate phi_{i+1} = (cap ^ (floor(phi_i) + 2)) - eps from phi_0 = 2.

    The terminal weight exponent is the fixed point; verdict "pass" iff the
    model threshold is strictly below it.  Integer-knife-edge phi values and
    fractional-part violations of the weight-pair condition are warnings.
    """
    model = model.lower()
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
    if d < 3:
        raise ValueError("need d >= 3")
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    spec = MODELS[model]
    cap_phi = spec["phi_cap"](d)
    cap_gamma = spec["gamma_cap"](d)
    lead = 2.0
    phi = 2.0
    steps = [(0, lead, float("nan"), phi)]
    warnings = []
    for i in range(1, max_iter + 1):
        gamma = min(cap_gamma, math.floor(phi)) - eps
        new_phi = min(cap_phi, math.floor(phi) + 2) - eps
        beta = spec["weight_beta"]
        frac = (beta + gamma) - (math.floor(beta) + math.floor(gamma))
        if frac >= 1:
            warnings.append(
                f"step {i}: weight pair ({beta}, {gamma:.4f}) violates the "
                "fractional-part condition"
            )
        if abs(phi - round(phi)) < 1e-12:
            if i > 1:
                warnings.append(f"step {i}: phi = {phi} sits on an integer knife-edge")
        steps.append((i, lead, gamma, new_phi))
        if new_phi == phi:
            break
        phi = new_phi
    terminal = phi
    threshold = spec["threshold"](d)
    return BootstrapTrace(
        model=model, d=d, eps=eps, steps=steps,
        terminal_alpha=terminal, threshold=threshold,
        verdict="pass" if threshold < terminal else "fail",
        rho=spec["rho"](d),
        warnings=warnings,
    )


def gate_table(eps: float, d_max: int = 64) -> dict:
    """Minimal dimension passing the verdict, per model."""
    out = {}
    for model in MODELS:
        gate = None
        for d in range(3, d_max + 1):
            if run_bootstrap(model, d, eps).verdict == "pass":
                gate = d
                break
        out[model] = gate
    return out
