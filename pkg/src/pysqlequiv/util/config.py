"""
pySqlEquiv Configuration

Settings resolve in this order, later sources winning: built-in defaults,
`PYSQLEQUIV_*` environment variables, rule-file pragmas, command line flags.
"""

from __future__ import annotations
from dataclasses import dataclass, replace
import os
from typing import Mapping
from ..interp.oracle import MODES, OracleConfig

ENV_PREFIX = "PYSQLEQUIV_"

DEFAULT_FUEL = 10000
NORMALIZE_SHARE = 0.7

# OracleConfig field -> environment variable suffix
ORACLE_ENV = {
    "depth": "ORACLE_DEPTH",
    "domain": "ORACLE_DOMAIN",
    "tuples": "ORACLE_TUPLES",
    "mult": "ORACLE_MULT",
    "seed": "SEED",
    "budget": "ORACLE_BUDGET",
    "jobs": "JOBS",
}


@dataclass(frozen=True)
class ProverBudget:
    """
    Fuel of one proof attempt.

    Attributes
    ----------
    fuel : int
        Total budget.

    normalize_share : float
        Fraction of `fuel` given to normalization; the rest goes to the
        witness search.
    """

    fuel: int = DEFAULT_FUEL
    normalize_share: float = NORMALIZE_SHARE

    def __post_init__(self) -> None:
        if not isinstance(self.fuel, int) or isinstance(self.fuel, bool) or self.fuel < 2:
            raise ValueError(f"ProverBudget 'fuel' must be an integer of at least 2, got {self.fuel!r}")
        if not 0 < self.normalize_share < 1:
            raise ValueError(
                "ProverBudget 'normalize_share' must lie strictly between 0 and 1, "
                f"got {self.normalize_share!r}"
            )

    @property
    def normalize_fuel(self) -> int:
        return max(1, int(self.fuel * self.normalize_share))

    @property
    def search_fuel(self) -> int:
        return max(1, self.fuel - self.normalize_fuel)

    def with_fuel(self, fuel: int | None) -> ProverBudget:
        """
        Same split with another total, or `self` when `fuel` is None.
        """
        return self if fuel is None else replace(self, fuel=fuel)

    def __sqlequiv_json__(self) -> dict:
        return {
            "__sqlequiv_type__": "ProverBudget",
            "fuel": self.fuel,
            "normalize_fuel": self.normalize_fuel,
            "search_fuel": self.search_fuel,
        }


def _env_int(environ: Mapping, suffix: str) -> int | None:
    name = ENV_PREFIX + suffix
    raw = environ.get(name)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"environment variable {name} must be an integer, got {raw!r}") from None


def budget_from_env(environ: Mapping | None = None, base: ProverBudget | None = None) -> ProverBudget:
    """
    Prover budget with `PYSQLEQUIV_FUEL` applied.

    Parameters
    ----------
    environ : Mapping[str, str], optional
        Environment to read, `os.environ` by default.

    base : ProverBudget, optional
        Budget to override, the defaults otherwise.

    Raises
    ------
    ValueError
        The variable is not a valid fuel value.
    """
    environ = os.environ if environ is None else environ
    base = base or ProverBudget()
    fuel = _env_int(environ, "FUEL")
    if fuel is None:
        return base
    try:
        return base.with_fuel(fuel)
    except ValueError as err:
        raise ValueError(f"environment variable {ENV_PREFIX}FUEL: {err}") from None


def oracle_config_from_env(
    environ: Mapping | None = None, base: OracleConfig | None = None
) -> OracleConfig:
    """
    Oracle bounds with the `PYSQLEQUIV_ORACLE_*`, `PYSQLEQUIV_MODE`,
    `PYSQLEQUIV_SEED` and `PYSQLEQUIV_JOBS` variables applied.

    Raises
    ------
    ValueError
        A variable is malformed or out of range.
    """
    environ = os.environ if environ is None else environ
    base = base or OracleConfig()
    changes = {}
    for field_name, suffix in ORACLE_ENV.items():
        value = _env_int(environ, suffix)
        if value is not None:
            changes[field_name] = value
    mode = environ.get(ENV_PREFIX + "MODE")
    if mode is not None and mode.strip():
        if mode.strip() not in MODES:
            raise ValueError(
                f"environment variable {ENV_PREFIX}MODE must be one of {MODES}, got {mode!r}"
            )
        changes["mode"] = mode.strip()
    try:
        return replace(base, **changes)
    except ValueError as err:
        names = ", ".join(ENV_PREFIX + ORACLE_ENV.get(k, "MODE") for k in sorted(changes))
        raise ValueError(f"environment variables {names}: {err}") from None
