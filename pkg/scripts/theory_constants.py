"""Print the theory constants for the small two-player game and a centred-initial-law variant."""
import numpy as np

from lqgame import check_assumptions, make_preset, solve_nash
from lqgame.game import GaussianInit


def show(name, spec, init):
    rep = check_assumptions(spec, init, solve_nash(spec), 1e-6)
    print(f"--- {name}")
    for k, v in rep.as_dict().items():
        print(f"  {k:<16} {v}")


if __name__ == "__main__":
    p = make_preset("remark31")
    show("remark31", p.spec, p.init_policy)
    centred = p.spec.replace(init_law=GaussianInit([0.0, 0.0], np.diag([0.2, 0.3])))
    show("remark31, zero-mean x0", centred, p.init_policy)
