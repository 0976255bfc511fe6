from pflab import GameSpec, HypothesisClass, SetSystem


def two_constant_game(horizon=3):
    """One instance, two labels, singleton sets, and the two constant rules."""
    return GameSpec(
        n_instances=1,
        n_labels=2,
        set_system=SetSystem.explicit(2, [0b01, 0b10]),
        hypotheses=HypothesisClass(1, 2, "explicit", ((0,), (1,))),
        horizon=horizon,
    )
