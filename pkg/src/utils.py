from functools import partial
from os import environ
from typing import Any, Dict, Mapping, Optional

from src.BayesNet.interfaces import IDistributionRoute
from src.BayesNet.lib import joint_distribution
from src.constants import Compressor, Environment, RouteName
from src.Postselection.lib import postselect_distribution
from src.Povm.lib import distribution_via_broadcast, distribution_via_povm
from src.QState.models import Tolerances

TOLERANCE_KEYS = tuple(Tolerances.model_fields)


def _match_compressor(compressor: str) -> Compressor:
    match compressor:
        case "lzma":
            return Compressor.LZMA
        case "gzip":
            return Compressor.GZIP
        case _:
            return Compressor.LZMA


def _match_environment(profile: str) -> Environment:
    match profile:
        case "strict":
            return Environment.STRICT
        case "fast":
            return Environment.FAST
        case _:
            return Environment.DEVELOPMENT


def _match_route(method: str, workers: Optional[int] = None) -> IDistributionRoute:
    match method:
        case RouteName.POSTSELECT:
            return partial(postselect_distribution, workers=workers)
        case RouteName.BROADCAST:
            return partial(distribution_via_broadcast, workers=workers)
        case RouteName.POVM:
            return partial(distribution_via_povm, workers=workers)
        case _:
            return joint_distribution


def _match_workers(workers: Optional[str]) -> Optional[int]:
    match workers:
        case None | "" | "auto":
            return None
        case _:
            return max(int(workers), 1)


def _match_tolerances(
    env: Mapping[str, str] = environ, overrides: Optional[Dict[str, Any]] = None
) -> Tolerances:
    """
    Tolerances from upper-cased environment keys (exported from the run profile or a
    .env file), with `overrides` taking precedence; unset keys keep their defaults.
    """
    values: Dict[str, Any] = {
        key: env[key.upper()] for key in TOLERANCE_KEYS if key.upper() in env
    }
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return Tolerances.model_validate(values)
