from typing import Protocol

from src.BayesNet.models import PathDistribution, Scenario


class IDistributionRoute(Protocol):
    def __call__(self, scenario: Scenario) -> PathDistribution:
        """Return the complete path distribution of a scenario"""
        ...
