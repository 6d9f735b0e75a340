"""Two-prover games: exact values, parallel repetition, correlated sampling, covers and bounds."""

from .errors import (BudgetExceeded, CrossRatioError, GameLabError, SamplingError, SchemaMismatch,
                     ValidationError, ZeroProbabilityError)
from .prob import ConditionalDistribution, Distribution, marginal, statistical_distance
from .games import (DeterministicStrategy, Game, SharedRandomnessStrategy, WinEventSpec, chsh,
                    classical_value, fortnow, repeat, win_probability)
from .nosignaling import Box, is_no_signaling, ns_value, pr_box
from .bounds import bound_cover, bound_local, bound_ns, recurrence_bound

__version__ = "0.1.0"
