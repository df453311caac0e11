"""Cart-pole balancing task.

A pole is hinged on a cart that moves along a frictionless track; the agent
pushes the cart left or right and is rewarded +1 per step until the pole
falls over or the cart leaves the track. State is (x, ẋ, θ, θ̇).
"""

from __future__ import annotations

import math

import numpy as np

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
HALF_LENGTH = 0.5  # half the pole length
POLE_MASS_LENGTH = MASS_POLE * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02  # seconds per Euler step

X_THRESHOLD = 2.4
THETA_THRESHOLD = 12 * 2 * math.pi / 360  # ~0.2095 rad


def reset(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-0.05, 0.05, size=4)


def step(state: np.ndarray, action: int) -> tuple[np.ndarray, float, bool]:
    x, x_dot, theta, theta_dot = state
    force = FORCE_MAG if action == 1 else -FORCE_MAG
    cos_th = math.cos(theta)
    sin_th = math.sin(theta)

    temp = (force + POLE_MASS_LENGTH * theta_dot**2 * sin_th) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_th - cos_th * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos_th**2 / TOTAL_MASS)
    )
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_th / TOTAL_MASS

    # explicit Euler: positions advance with the old velocities
    x = x + TAU * x_dot
    x_dot = x_dot + TAU * x_acc
    theta = theta + TAU * theta_dot
    theta_dot = theta_dot + TAU * theta_acc

    next_state = np.array([x, x_dot, theta, theta_dot])
    terminal = abs(x) > X_THRESHOLD or abs(theta) > THETA_THRESHOLD
    return next_state, 1.0, terminal
