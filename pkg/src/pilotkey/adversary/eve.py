"""Bohmian eavesdropper: key-bit guesses from hidden positions."""

from __future__ import annotations

from typing import TYPE_CHECKING

from pilotkey.core.models import EveStrategy
from pilotkey.core.utils import bit_from_sign, strict_sign


if TYPE_CHECKING:
    from pilotkey.core.models import EveKnowledge, PhysParams, ProtocolRound


def eve_guess_baseline(
    knowledge: EveKnowledge, round_: ProtocolRound, p: PhysParams | None = None
) -> str:
    """Alice's bit when s is fixed at +1 and public.

    Without ``p`` the guess is W_A = -sgn(z20). With ``p`` it is the conserved
    W_A = sgn(z10 - K z20), which full trajectories follow even when Alice's
    particle starts further out than Bob's.
    """
    pos = knowledge.positions[round_.index]
    if p is not None:
        return bit_from_sign(strict_sign(pos.z10 - p.bob_scale * pos.z20))
    return bit_from_sign(-strict_sign(pos.z20))


def eve_guess_protocol(
    knowledge: EveKnowledge,
    round_: ProtocolRound,
    strategy: EveStrategy | None = None,
    p: PhysParams | None = None,
) -> str:
    """Best guess of Alice's bit when s is drawn after the pair left the source.

    Eve uses s when her view contains it (broken generator) and otherwise the
    strategy's guess. The key bit is -sgn(z20) s, so without s she is reduced
    to a coin toss however much she knows about the positions.
    """
    strategy = strategy or EveStrategy()
    pos = knowledge.positions[round_.index]
    seen = knowledge.s_for(round_.index)
    s = seen if seen is not None else strategy.s_guess(round_.index)
    if strategy.use_z10 and p is not None:
        w_a = strict_sign(pos.z10 - s * p.bob_scale * pos.z20)
    else:
        w_a = -strict_sign(pos.z20) * s
    return bit_from_sign(w_a)
