"""Born-statistics oracle for singlet outcomes at arbitrary measurement axes."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

from pilotkey.core.models import Outcome
from pilotkey.core.utils import fair_sign


if TYPE_CHECKING:
    import numpy as np


def singlet_outcomes(
    alice_angle: float, bob_angle: float, s: int, rng: np.random.Generator
) -> Outcome:
    """Sample spin outcomes with E[sigma_A sigma_B] = -cos(alice_angle - bob_angle).

    Bob's field flip reverses his reported side: W_A = sigma_A, W_B = s sigma_B.
    """
    sigma_b = fair_sign(rng)
    same = rng.random() < (1.0 - math.cos(alice_angle - bob_angle)) / 2.0
    sigma_a = sigma_b if same else -sigma_b
    return Outcome(w_a=sigma_a, w_b=s * sigma_b)


def intercepted_outcomes(
    alice_angle: float, bob_angle: float, s: int, rng: np.random.Generator
) -> Outcome:
    """Outcomes after Eve measures along z and resends the product state.

    The pair becomes |r>|-r> for a fair r, so E[sigma_A sigma_B] = -cos(a) cos(b).
    Aligned rounds at angle 0 stay perfectly anticorrelated.
    """
    r = fair_sign(rng)
    sigma_a = 1 if rng.random() < (1.0 + r * math.cos(alice_angle)) / 2.0 else -1
    sigma_b = 1 if rng.random() < (1.0 - r * math.cos(bob_angle)) / 2.0 else -1
    return Outcome(w_a=sigma_a, w_b=s * sigma_b)
