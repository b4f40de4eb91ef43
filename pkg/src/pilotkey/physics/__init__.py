"""Closed-form physics of the double Stern-Gerlach singlet."""

from __future__ import annotations

from pilotkey.physics.wavefunction import (
    TANH_SATURATION,
    branch_argument,
    comoving_coordinate,
    current1,
    current2,
    density,
    epsilon,
    guidance_velocities,
    packet_centers,
    reduced_velocity1,
    reduced_velocity2,
    saturated_tanh,
    separation_coordinate,
    spreading_rate,
    velocity1,
    velocity2,
    wavefunction,
)


__all__ = [
    "TANH_SATURATION",
    "branch_argument",
    "comoving_coordinate",
    "current1",
    "current2",
    "density",
    "epsilon",
    "guidance_velocities",
    "packet_centers",
    "reduced_velocity1",
    "reduced_velocity2",
    "saturated_tanh",
    "separation_coordinate",
    "spreading_rate",
    "velocity1",
    "velocity2",
    "wavefunction",
]
