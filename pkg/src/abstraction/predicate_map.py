import itertools
from typing import Mapping, Optional, Sequence

import numpy as np

from src.abstraction.regions import IntervalBox, PredicateRegion
from src.hybrid.predicates import AffinePredicate
from src.interfaces.IPredicate import IPredicate
from src.interfaces.IRegion import IRegion
from src.properties.layout import MemoryForm, OscillationLayout
from src.properties.oscillation import OSC
from src.properties.specs import OscillationSpec

Valuation = tuple[bool, ...]


class PredicateMap:
    """
    Per-location predicate vectors lambda(q). Locations without an entry use the constant-true vector.

    Args:
        predicates (Mapping[str, Sequence[IPredicate]]): lambda(q) for the locations that refine.
        sampling_box (tuple[np.ndarray, np.ndarray], optional): Box used to decide emptiness of
            cells that are not interval boxes.
    """

    def __init__(self, predicates: Mapping[str, Sequence[IPredicate]],
                 sampling_box: Optional[tuple[np.ndarray, np.ndarray]] = None):
        self._predicates = {q: tuple(ps) for q, ps in predicates.items() if ps}
        self._sampling_box = sampling_box

    def predicates(self, location: str) -> tuple[IPredicate, ...]:
        return self._predicates.get(location, (AffinePredicate.top(),))

    def arity(self, location: str) -> int:
        return len(self.predicates(location))

    def refined_locations(self) -> tuple[str, ...]:
        return tuple(self._predicates)

    def support(self, location: str) -> tuple[int, ...]:
        indices = set()
        for predicate in self.predicates(location):
            indices.update(predicate.support())
        return tuple(sorted(indices))

    def is_interval_map(self, location: str) -> bool:
        """All predicates are constant or single-coordinate affine."""
        return all(isinstance(p, AffinePredicate) and (p.is_constant() or p.is_single_coordinate())
                   for p in self.predicates(location))

    def alpha(self, location: str, x: np.ndarray) -> Valuation:
        return tuple(bool(p.holds(x)) for p in self.predicates(location))

    def gamma(self, location: str, valuation: Valuation) -> IRegion:
        predicates = self.predicates(location)
        if len(valuation) != len(predicates):
            raise ValueError(f"valuation of length {len(valuation)} for {len(predicates)} predicates of {location}")
        if not self.is_interval_map(location):
            lower, upper = self._sampling_box if self._sampling_box is not None else (None, None)
            return PredicateRegion(list(zip(predicates, valuation)), lower, upper)
        box = IntervalBox.everything()
        for predicate, truth in zip(predicates, valuation):
            if predicate.is_constant():
                if predicate.holds(np.zeros(0)) != truth:
                    return IntervalBox.empty()
                continue
            box = box.restrict(predicate.support()[0], predicate.interval(truth))
        return box

    def cells(self, location: str) -> list[Valuation]:
        """Nonempty valuations, True before False in each position."""
        cells = []
        for valuation in itertools.product((True, False), repeat=self.arity(location)):
            if not self.gamma(location, valuation).is_empty():
                cells.append(valuation)
        return cells


def alpha(predicate_map: PredicateMap, location: str, x: np.ndarray) -> Valuation:
    return predicate_map.alpha(location, x)


def gamma(predicate_map: PredicateMap, location: str, valuation: Valuation) -> IRegion:
    return predicate_map.gamma(location, valuation)


def oscillation_predicate_map(spec: OscillationSpec, variable_names: Optional[Sequence[str]] = None) -> PredicateMap:
    """
    Partition of the OSC location along each monitored z coordinate:
    (z >= eps, eps > z, z > -eps, -eps >= z). Other locations are not refined.
    """
    layout = OscillationLayout.from_spec(spec, MemoryForm.DIFFERENCE)
    eps = spec.epsilon
    predicates = []
    for j in layout.memory_of(spec.monitored):
        name = variable_names[j] if variable_names is not None else f"x[{j}]"
        predicates += [
            AffinePredicate.at_least(j, eps, f"{name} >= {eps:g}"),
            AffinePredicate.below(j, eps, f"{eps:g} > {name}"),
            AffinePredicate.above(j, -eps, f"{name} > {-eps:g}"),
            AffinePredicate.at_most(j, -eps, f"{-eps:g} >= {name}"),
        ]
    return PredicateMap({OSC: predicates})
