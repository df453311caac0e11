"""Simplified 2-D lander.

A planar point mass with orientation descends toward flat terrain at y=0
with a landing pad spanning x in [-0.2, 0.2]. This is intentionally a
lightweight stand-in for a rigid-body lander: no contact solver, no wind,
legs modelled as a single touch condition. Reward structure: +100 for a
slow upright touchdown, -100 for any other ground contact, +10 per leg on
first contact, a small potential-based shaping term, and fuel costs per
engine firing.

State: (x, y, ẋ, ẏ, θ, θ̇, left-leg contact, right-leg contact).
Actions: 0 do nothing, 1 fire left engine, 2 fire main engine,
3 fire right engine.
"""

from __future__ import annotations

import math

import numpy as np

GRAVITY = -1.6  # units/s^2
MAIN_ACCEL = 13.0  # along the body's up axis
SIDE_ACCEL = 0.6  # lateral push from a side engine
SIDE_TORQUE = 0.05  # angular velocity change per side-engine firing
DT = 0.02

PAD_HALF_WIDTH = 0.2
CONTACT_HEIGHT = 0.01
CONTACT_MAX_TILT = 0.35
LANDING_MAX_SPEED = 0.5

MAIN_COST = 0.3
SIDE_COST = 0.03
LEG_BONUS = 10.0
LANDING_REWARD = 100.0
CRASH_REWARD = -100.0

START_Y = 1.4


def reset(rng: np.random.Generator) -> np.ndarray:
    x = rng.uniform(-0.3, 0.3)
    vx = rng.uniform(-0.1, 0.1)
    vy = rng.uniform(-0.1, 0.1)
    theta = rng.uniform(-0.1, 0.1)
    omega = rng.uniform(-0.05, 0.05)
    return np.array([x, START_Y, vx, vy, theta, omega, 0.0, 0.0])


def _potential(state: np.ndarray) -> float:
    x, y, vx, vy, theta = state[:5]
    return -(math.sqrt(x * x + y * y) + abs(vx) + abs(vy) + abs(theta))


def step(state: np.ndarray, action: int) -> tuple[np.ndarray, float, bool]:
    x, y, vx, vy, theta, omega, leg_l, leg_r = state

    ax, ay = 0.0, GRAVITY
    reward = 0.0
    if action == 2:
        # body up axis is (-sin θ, cos θ)
        ax += MAIN_ACCEL * -math.sin(theta)
        ay += MAIN_ACCEL * math.cos(theta)
        reward -= MAIN_COST
    elif action in (1, 3):
        # left engine pushes the craft toward body-right and spins it +θ
        direction = 1.0 if action == 1 else -1.0
        ax += direction * SIDE_ACCEL * math.cos(theta)
        ay += direction * SIDE_ACCEL * math.sin(theta)
        omega += direction * SIDE_TORQUE
        reward -= SIDE_COST

    # semi-implicit Euler: velocities first, then positions
    vx += ax * DT
    vy += ay * DT
    x += vx * DT
    y += vy * DT
    theta += omega * DT

    touching = y <= CONTACT_HEIGHT and abs(theta) < CONTACT_MAX_TILT
    new_leg_l = 1.0 if touching else 0.0
    new_leg_r = 1.0 if touching else 0.0

    next_state = np.array([x, y, vx, vy, theta, omega, new_leg_l, new_leg_r])

    reward += _potential(next_state) - _potential(state)
    if new_leg_l and not leg_l:
        reward += LEG_BONUS
    if new_leg_r and not leg_r:
        reward += LEG_BONUS

    terminal = False
    if touching:
        terminal = True
        if abs(vy) < LANDING_MAX_SPEED and abs(vx) < LANDING_MAX_SPEED:
            reward += LANDING_REWARD
        else:
            reward += CRASH_REWARD
    elif y <= 0.0:
        # hit the ground without both legs down (tilted too far)
        terminal = True
        reward += CRASH_REWARD

    return next_state, reward, terminal
