"""Acrobot swing-up task.

Two links hang from a fixed pivot; only the joint between the links is
actuated (torque -1, 0, or +1). Each step costs -1 until the tip swings
above the bar. The observation encodes the two joint angles as sin/cos
pairs followed by the angular velocities; the dynamics integrate in angle
space (RK4, one step of dt=0.2 s) and re-encode afterwards.

Angles are measured from the downward vertical, so the hanging rest state
is θ1 = θ2 = 0.
"""

from __future__ import annotations

import math

import numpy as np

LINK_LENGTH_1 = 1.0
LINK_LENGTH_2 = 1.0
LINK_MASS_1 = 1.0
LINK_MASS_2 = 1.0
LINK_COM_1 = 0.5  # center of mass, fraction of link 1
LINK_COM_2 = 0.5
LINK_MOI = 1.0  # moment of inertia of each link
GRAVITY = 9.8
DT = 0.2
MAX_VEL_1 = 4 * math.pi
MAX_VEL_2 = 9 * math.pi

TORQUES = (-1.0, 0.0, 1.0)


def reset(rng: np.random.Generator) -> np.ndarray:
    theta1, theta2, dtheta1, dtheta2 = rng.uniform(-0.1, 0.1, size=4)
    return _observe(theta1, theta2, dtheta1, dtheta2)


def _observe(theta1: float, theta2: float, dtheta1: float, dtheta2: float) -> np.ndarray:
    return np.array(
        [
            math.sin(theta1),
            math.cos(theta1),
            math.sin(theta2),
            math.cos(theta2),
            dtheta1,
            dtheta2,
        ]
    )


def _derivatives(s: np.ndarray, torque: float) -> np.ndarray:
    m1, m2 = LINK_MASS_1, LINK_MASS_2
    l1 = LINK_LENGTH_1
    lc1, lc2 = LINK_COM_1, LINK_COM_2
    i1, i2 = LINK_MOI, LINK_MOI
    g = GRAVITY
    theta1, theta2, dtheta1, dtheta2 = s

    d1 = m1 * lc1**2 + m2 * (l1**2 + lc2**2 + 2 * l1 * lc2 * math.cos(theta2)) + i1 + i2
    d2 = m2 * (lc2**2 + l1 * lc2 * math.cos(theta2)) + i2
    phi2 = m2 * lc2 * g * math.cos(theta1 + theta2 - math.pi / 2)
    phi1 = (
        -m2 * l1 * lc2 * dtheta2**2 * math.sin(theta2)
        - 2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * math.sin(theta2)
        + (m1 * lc1 + m2 * l1) * g * math.cos(theta1 - math.pi / 2)
        + phi2
    )
    ddtheta2 = (
        torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1**2 * math.sin(theta2) - phi2
    ) / (m2 * lc2**2 + i2 - d2**2 / d1)
    ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
    return np.array([dtheta1, dtheta2, ddtheta1, ddtheta2])


def _rk4(s: np.ndarray, torque: float) -> np.ndarray:
    k1 = _derivatives(s, torque)
    k2 = _derivatives(s + DT / 2 * k1, torque)
    k3 = _derivatives(s + DT / 2 * k2, torque)
    k4 = _derivatives(s + DT * k3, torque)
    return s + DT / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


def _goal_reached(theta1: float, theta2: float) -> bool:
    return -math.cos(theta1) - math.cos(theta1 + theta2) > 1.0


def energy_pumping_action(state: np.ndarray) -> int:
    """Scripted swing-up baseline: torque aligned with the joint velocity.

    The actuated joint is the one between the links, so torque in the
    direction of θ̇2 always does non-negative work and the tip rises within
    a few dozen steps. Used as a physics sanity check.
    """
    return 2 if state[5] >= 0 else 0


def step(state: np.ndarray, action: int) -> tuple[np.ndarray, float, bool]:
    theta1 = math.atan2(state[0], state[1])
    theta2 = math.atan2(state[2], state[3])
    s = np.array([theta1, theta2, state[4], state[5]])

    s = _rk4(s, TORQUES[action])
    theta1 = _wrap(s[0])
    theta2 = _wrap(s[1])
    dtheta1 = min(max(s[2], -MAX_VEL_1), MAX_VEL_1)
    dtheta2 = min(max(s[3], -MAX_VEL_2), MAX_VEL_2)

    terminal = _goal_reached(theta1, theta2)
    reward = 0.0 if terminal else -1.0
    return _observe(theta1, theta2, dtheta1, dtheta2), reward, terminal
