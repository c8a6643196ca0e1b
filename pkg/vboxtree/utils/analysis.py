"""Closed-form bounds from the complexity analysis, for comparing against
measured build and query statistics."""

import math

# lg and ceil of values that are exact powers in real arithmetic
_GUARD = 1e-9


def angle_steps(eps: float) -> int:
    """Number of angle multiples of eps in [0, pi)."""
    if eps >= math.pi:
        return 1
    return math.ceil(math.pi / eps - _GUARD)


def orientation_count(eps: float, d: int) -> int:
    return angle_steps(eps) ** (d - 1) - 1


def depth_bound(volume_ratio: float, d: int) -> int:
    return math.floor(math.log2(volume_ratio) / d + _GUARD) + 1


def _node_formula(ratio: float, d: int) -> float:
    fan = 2 ** d
    return fan * fan / (fan - 1) * ratio - 1 / (fan - 1)


def round_ratio(volume_ratio: float, d: int) -> float:
    """V/delta rounded up to the next power of 2^d."""
    k = max(0, math.ceil(math.log2(volume_ratio) / d - _GUARD))
    return float(2 ** (d * k))


def main_node_bound(volume_ratio: float, d: int) -> float:
    return _node_formula(round_ratio(volume_ratio, d), d)


def aux_depth_bound(scale: float) -> int:
    return math.floor(math.log2(scale) + _GUARD) + 1


def aux_node_bound(scale: float, d: int) -> float:
    return _node_formula(scale ** d, d)


def literal_aux_node_bound(d: int) -> float:
    """Stated count for a root of volume 2*delta: (2^(2d+1) - 1) / (2^d - 1)."""
    return (2 ** (2 * d + 1) - 1) / (2 ** d - 1)


def space_bound(volume_ratio: float, eps: float, d: int, c: float = 4.0) -> float:
    return c * 4 ** d * volume_ratio * angle_steps(eps) ** (d - 1)


def preprocessing_bound(volume_ratio: float, eps: float, d: int, n: int) -> float:
    """Without the Voronoi-construction term, which this package never pays."""
    lists = angle_steps(eps) ** (d - 1)
    return 4 ** d * volume_ratio * lists + d * n * lists + math.log2(volume_ratio) / d


def query_node_bound(volume_ratio: float, eps: float, d: int, scale: float) -> int:
    return depth_bound(volume_ratio, d) + orientation_count(eps, d) * (
        math.floor(math.log2(scale) + _GUARD) + 2
    )


def predicted_cardinality(n: int, d: int, eps: float, r: float) -> float:
    if r <= 0:
        return float(n)
    return (eps / (2.0 * r)) ** d * n
