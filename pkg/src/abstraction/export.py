import csv
from typing import Optional, TextIO

from src.abstraction.metropolis import TargetDistribution, TransitionMatrix
from src.abstraction.transition_system import AbstractTransitionSystem

MATRIX_ROW_SUM = 'row_sum'


def export_edge_list(system: AbstractTransitionSystem) -> str:
    """One `source -> target [kinds]` line per edge, in declaration order."""
    lines = []
    for source, target in system.edges():
        kinds = ','.join(sorted(kind.value for kind in system.edge_kinds(source, target)))
        lines.append(f"{source.label} -> {target.label} [{kinds}]")
    return '\n'.join(lines) + '\n'


def export_states_csv(system: AbstractTransitionSystem, stream: TextIO, target: Optional[TargetDistribution] = None):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['index', 'state', 'location', 'valuation', 'duplicate', 'out_degree', 'target_probability'])
    for i, state in enumerate(system.states()):
        valuation = ''.join('1' if b else '0' for b in state.valuation)
        probability = repr(target.probability(state)) if target is not None else ''
        writer.writerow([i, state.label, state.location, valuation, int(state.duplicate), system.out_degree(state), probability])


def export_matrix_csv(matrix: TransitionMatrix, stream: TextIO, decimals: Optional[int] = None):
    """
    Write P with a header of state labels and a trailing row-sum column.

    Full precision uses repr(float); `decimals` renders every entry with that many digits.
    """
    writer = csv.writer(stream, lineterminator='\n')
    labels = [state.label for state in matrix.states()]
    writer.writerow(['state'] + labels + [MATRIX_ROW_SUM])

    def render(value: float) -> str:
        return repr(float(value)) if decimals is None else f"{value:.{decimals}f}"

    for label, row in zip(labels, matrix.matrix()):
        writer.writerow([label] + [render(v) for v in row] + [f"{row.sum():.6f}"])
