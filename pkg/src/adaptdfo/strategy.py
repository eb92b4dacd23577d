"""Sample-set size rules and the adaptive strategies built from them."""
import itertools
from dataclasses import dataclass
from enum import Enum

from .geometry import IterationOutcome


class SizeRule(Enum):
    LIN = "lin"
    BILIN = "2n"
    MEAN = "mean"
    QUA = "quad"

    @property
    def code(self):
        return self.value

    def __lt__(self, other):
        return _ORDER[self] < _ORDER[other]


_ORDER = {rule: i for i, rule in enumerate(SizeRule)}


def sample_size_for(rule, n):
    """Number of sample points prescribed by ``rule`` in dimension ``n``."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rule = SizeRule(rule)
    lin = n + 1
    qua = (n + 1) * (n + 2) // 2
    if rule is SizeRule.LIN:
        return lin
    if rule is SizeRule.BILIN:
        return 2 * n + 1
    if rule is SizeRule.MEAN:
        return (lin + qua) // 2
    return qua


@dataclass(frozen=True, order=True)
class Strategy:
    """Rules used after a serious step, a type-1 and a type-2 null step."""

    n_s: SizeRule
    n_n1: SizeRule
    n_n2: SizeRule

    def __post_init__(self):
        for name in ("n_s", "n_n1", "n_n2"):
            object.__setattr__(self, name, SizeRule(getattr(self, name)))

    def __str__(self):
        return f"{self.n_s.code}/{self.n_n1.code}/{self.n_n2.code}"

    @classmethod
    def parse(cls, text):
        """Parse ``"lin/2n/quad"``-style strings."""
        parts = text.strip().lower().split("/")
        if len(parts) != 3:
            raise ValueError(f"strategy must look like 'lin/2n/quad', got {text!r}")
        try:
            return cls(*(SizeRule(p) for p in parts))
        except ValueError:
            codes = ", ".join(r.code for r in SizeRule)
            raise ValueError(f"unknown size rule in {text!r}; expected one of {codes}") from None

    def rule_for(self, outcome):
        outcome = IterationOutcome(outcome)
        if outcome is IterationOutcome.SERIOUS:
            return self.n_s
        if outcome is IterationOutcome.NULL_TYPE1:
            return self.n_n1
        return self.n_n2

    @property
    def is_adaptive(self):
        return not (self.n_s == self.n_n1 == self.n_n2)


def next_size(strategy, outcome, n):
    return sample_size_for(strategy.rule_for(outcome), n)


def enumerate_strategies():
    """All 64 rule triples in lexicographic order (lin < 2n < mean < quad)."""
    return [Strategy(*rules) for rules in itertools.product(SizeRule, repeat=3)]


#: strategies shown in the data-profile figures: the two non-adaptive
#: extremes and the two best adaptive ones
PROFILE_STRATEGIES = tuple(Strategy.parse(s) for s in ("lin/lin/lin", "quad/quad/quad", "lin/lin/2n", "lin/2n/lin"))
