import json
from dataclasses import dataclass, field
from typing import Optional

from src.hybrid.state import Event, Trace
from src.properties.verdict import Verdict


@dataclass(frozen=True)
class Coverage:
    counts: dict[str, int]
    visited: int
    total: int

    @property
    def fraction(self) -> float:
        return self.visited / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {'counts': dict(self.counts), 'visited': self.visited, 'total': self.total, 'fraction': self.fraction}


@dataclass(eq=False)
class FalsificationReport:
    """
    Result of one exploration. `to_dict` leaves out wall-clock data so that reruns with the
    same seed serialize byte-identically; `timing()` carries it separately.
    """
    verdict: Verdict
    witness: list[Event]
    witness_node: int
    tree_size: int
    iterations: int
    coverage: Coverage
    goal_counts: dict[str, int]
    empty_cell_warnings: int
    exhausted_nodes: int
    max_deviation: float
    seed: int
    config: dict = field(default_factory=dict)
    abstraction: dict = field(default_factory=dict)
    elapsed: float = 0.0
    witness_trace: Optional[Trace] = field(default=None, repr=False)

    def falsified(self) -> bool:
        return self.verdict.is_falsified()

    def to_dict(self) -> dict:
        return {
            'verdict': self.verdict.to_dict(),
            'seed': self.seed,
            'tree_size': self.tree_size,
            'iterations': self.iterations,
            'witness_node': self.witness_node,
            'witness_length': len(self.witness),
            'witness': [event.to_dict() for event in self.witness],
            'max_deviation': self.max_deviation,
            'exit_value': self.verdict.exit_value,
            'coverage': self.coverage.to_dict(),
            'goal_counts': dict(sorted(self.goal_counts.items())),
            'empty_cell_warnings': self.empty_cell_warnings,
            'exhausted_nodes': self.exhausted_nodes,
            'abstraction': self.abstraction,
            'config': self.config,
        }

    def timing(self) -> dict:
        return {'seed': self.seed, 'elapsed_seconds': self.elapsed, 'tree_size': self.tree_size,
                'iterations': self.iterations}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)
