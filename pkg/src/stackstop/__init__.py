"""Solvers for the two-player secretary game with priority."""

from .classical import P1Solution, solve_p1, stopping_reward_z
from .near_optimal import NearOptimalSolution, count_threshold_K, solve_near_optimal, w_approx
from .posterior import PosteriorState, posterior_from_history, update_posterior
from .response import GameSolution, q_threshold, solve_game, value_v

__version__ = "0.1.0"
