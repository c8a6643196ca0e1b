from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field

from vboxtree.config import (
    DEFAULT_MARGIN,
    DEFAULT_MAX_DIM,
    MAX_HASH_CELLS,
    ORACLE_SAMPLES,
    ORACLE_SLACK,
)


# Build schemas
class BuildParams(BaseModel):
    """Resolved parameters of one index: eps, the volume tolerance and the
    auxiliary scale. Use `boxtree.make_params` to derive delta and scale."""

    model_config = ConfigDict(frozen=True)

    eps: float = Field(..., gt=0, description="Approximation radius")
    delta: float = Field(..., gt=0, description="Volume tolerance")
    margin_factor: float = Field(DEFAULT_MARGIN, ge=0)
    scale_factor: float = Field(..., ge=2)
    max_dim: int = Field(DEFAULT_MAX_DIM, ge=1)


class BuildOptions(BaseModel):
    margin: float = Field(DEFAULT_MARGIN, ge=0)
    scale: Optional[float] = Field(None, ge=2, description="None means max(2, sqrt(d))")
    max_dim: int = Field(DEFAULT_MAX_DIM, ge=1)
    hash_locate: bool = False
    cache_internal_sites: bool = True
    lazy_aux: bool = False
    # grow main and auxiliary boxes on first descent; implies lazy_aux
    lazy_tree: bool = False
    max_hash_cells: int = Field(MAX_HASH_CELLS, ge=1)


class BuildStats(BaseModel):
    volume_ratio: float = 0.0
    main_nodes: int = 0
    main_leaves: int = 0
    multi_site_leaves: int = 0
    max_main_depth: int = 0
    nodes_per_depth: List[int] = Field(default_factory=list)
    aux_lists: int = 0
    aux_trees: int = 0
    aux_nodes: int = 0
    max_aux_depth: int = 0
    max_aux_nodes: int = 0
    feasibility_calls: int = 0
    lp_solves: int = 0
    leaf_site_entries: int = 0
    cached_site_entries: int = 0
    hash_cells: int = 0

    @property
    def total_nodes(self) -> int:
        return self.main_nodes + self.aux_nodes


# Query schemas
class QueryResult(BaseModel):
    s_prime: List[int]
    exact: bool
    nodes_visited: int = 0
    lists_traversed: int = 0
    exterior: bool = False


class QueryStats(BaseModel):
    nodes_visited: int
    lists_traversed: int
    node_bound: int
    list_bound: int

    @property
    def within_bound(self) -> bool:
        return (
            self.nodes_visited <= self.node_bound
            and self.lists_traversed <= self.list_bound
        )


# Oracle schemas
class OracleConfig(BaseModel):
    samples_per_ball: int = Field(ORACLE_SAMPLES, ge=1)
    rng_seed: int = 0
    slack: float = Field(ORACLE_SLACK, ge=0, lt=1)


class TrialRecord(BaseModel):
    trial: int
    seed: int
    r: float
    cardinality: int
    nodes: int


class ExperimentReport(BaseModel):
    n: int
    d: int
    eps: float
    r: float
    predicted: float
    measured_mean: float
    trials: int
    records: List[TrialRecord] = Field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.measured_mean / self.predicted if self.predicted > 0 else float("inf")


class CheckReport(BaseModel):
    queries: int
    completeness_failures: int = 0
    soundness_passes: int = 0
    sandwich_passes: int = 0
    max_witness_radius: float = 0.0

    @property
    def completeness_rate(self) -> float:
        return 1.0 - self.completeness_failures / self.queries if self.queries else 1.0

    @property
    def soundness_rate(self) -> float:
        return self.soundness_passes / self.queries if self.queries else 1.0

    @property
    def sandwich_rate(self) -> float:
        return self.sandwich_passes / self.queries if self.queries else 1.0


class BenchReport(BaseModel):
    queries: int
    node_bound: int
    violations: int
    mean_nodes: float
    median_nodes: float
    p99_nodes: float
    max_nodes: int
    mean_lists: float
    mean_us: float
    median_us: float
    p99_us: float
