"""Extreme Bell nonlocality toolkit.

Behaviors, local content, critical nonlocal tables of zeros, nonlocal
games and their liftings, quantum strategies, and moment-matrix
relaxations.
"""

__version__ = "0.1.0"

from .core import (Behavior, BellError, DeterministicStrategy,  # noqa: F401
                   IncompleteTableError, InvalidStrategyError, Scenario,
                   behavior_from_dict, behavior_to_dict, induced_behavior,
                   load_behavior, mix, ns_dimension, save_behavior,
                   uniform_behavior, validate_behavior)
from .zeros import (CntzOptions, TableOfZeros, brute_force_cntz,  # noqa: F401
                    enumerate_cntz, generate_zpb, is_critical,
                    is_lhv_realizable, load_fixture, load_table, save_table,
                    zeros_from_behavior)
from .polytope import (BellExpression, local_content, local_value,  # noqa: F401
                       ns_value, tightness_verdict)
from .games import (Game, builtin_game, classical_value,  # noqa: F401
                    expression_from_game, game_from_zeros, lift_game,
                    load_game, save_game, winning_probability)
from .npa import npa_feasible, npa_upper_bound  # noqa: F401
from .symmetry import bell_group, canonical_form, group_reduce  # noqa: F401
