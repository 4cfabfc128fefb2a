import json
import math
import os
from typing import Any, Iterable, Optional

import numpy as np


class Tools:
    """Utility class containing helper methods shared by the runner and the reports"""

    @staticmethod
    def parse_int_list(text: str) -> list[int]:
        """Parse "1,2,5" (whitespace allowed) into [1, 2, 5].

        Raises:
            ValueError: on an empty list or a non-integer item
        """
        items = [item.strip() for item in text.split(',') if item.strip()]
        if not items:
            raise ValueError(f"expected a comma-separated list of integers, got '{text}'")
        try:
            return [int(item) for item in items]
        except ValueError:
            raise ValueError(f"expected a comma-separated list of integers, got '{text}'") from None

    @staticmethod
    def finite_or_none(value: float) -> Optional[float]:
        """JSON has no infinity; unreachable hitting times and the like are written as null."""
        value = float(value)
        return value if math.isfinite(value) else None

    @staticmethod
    def percentiles(values: Iterable[float], quantiles=(50, 90, 100)) -> dict[str, Optional[float]]:
        values = np.asarray(list(values), dtype=float)
        if values.size == 0:
            return {f"p{q}": None for q in quantiles}
        return {f"p{q}": float(np.percentile(values, q)) for q in quantiles}

    @staticmethod
    def write_json(path: str, data: Any):
        with open(path, 'w') as file:
            json.dump(data, file, indent=2)
            file.write('\n')

    @staticmethod
    def ensure_directory(path: str) -> str:
        os.makedirs(path, exist_ok=True)
        return path
