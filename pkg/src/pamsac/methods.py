"""Method registry: names to ``method(profile, seats) -> ElectionResult``."""

from __future__ import annotations

from fractions import Fraction
from functools import partial

from . import rivals
from .core import ElectionConfig, ScoreProfile
from .tally import tally, tally_score

METHODS = ("pamsac", "pamsack", "sav", "pav-dhondt", "pav-sl", "monroe", "cc", "ebert", "minimax")


def _approval_only(fn, name):
    def run(profile, seats):
        if isinstance(profile, ScoreProfile):
            if profile.max_score != 1:
                raise ValueError(f"{name} takes approval ballots")
            profile = profile.approval_image()
        return fn(profile, seats)

    return run


def get_method(
    name: str,
    cfat_fraction=Fraction(1, 2),
    removal: str = "greedy",
    granularity: int = 6,
    sequential: bool = False,
):
    """Return a callable for ``name``.

    The keyword options configure only the PAMSAC family; the rivals have no
    parameters.  Unknown names raise :class:`KeyError`.
    """
    search = "sequential" if sequential else "exhaustive"

    def config(seats):
        return ElectionConfig(seats, cfat_fraction, removal, granularity, search)

    if name == "pamsac":
        return lambda profile, seats: tally(profile, config(seats))
    if name == "pamsack":
        def run(profile, seats):
            if isinstance(profile, ScoreProfile):
                return tally_score(profile, config(seats))
            return tally(profile, config(seats), method="pamsack")

        return run
    table = {
        "sav": rivals.sav_tally,
        "pav-dhondt": partial(rivals.pav_tally, variant="dhondt"),
        "pav-sl": partial(rivals.pav_tally, variant="sainte_lague"),
        "monroe": rivals.monroe_tally,
        "cc": rivals.cc_tally,
        "ebert": rivals.ebert_tally,
        "minimax": rivals.minimax_tally,
    }
    if name not in table:
        raise KeyError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return _approval_only(table[name], name)
