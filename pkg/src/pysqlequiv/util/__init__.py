"""
pySqlEquiv Util Exports
"""

from .json_encoder import SqlEquivJsonEncoder
from .config import (
    ENV_PREFIX,
    DEFAULT_FUEL,
    ProverBudget,
    OracleConfig,
    budget_from_env,
    oracle_config_from_env,
)
