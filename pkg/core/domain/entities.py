"""Domain entities for graphlim experiments."""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class EstimateKind(str, Enum):
    """How a distance value relates to the true distance."""
    EXACT = "exact"
    UPPER_BOUND = "upper-bound"
    LOWER_BOUND = "lower-bound"


class StarMode(str, Enum):
    """Star comparison modes for the labeled-star distance."""
    INDUCED = "induced"
    INCIDENT = "incident"


class SearchMode(str, Enum):
    """Permutation search modes."""
    EXACT = "exact"
    HEURISTIC = "heuristic"


class FunctionalKind(str, Enum):
    """Declared kind of a graph functional."""
    ALMOST_ADDITIVE = "almost-additive"
    SUBADDITIVE = "subadditive"
    UNKNOWN = "unknown"


class HyperfiniteTag(str, Enum):
    """Whether a sequence is expected to be hyperfinite."""
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class PartitionStrategy(str, Enum):
    """Partitioner selection."""
    AUTO = "auto"
    PATH = "path"
    TORUS = "torus"
    TREE = "tree"
    CARVE = "carve"


class Metric(str, Enum):
    """Graph distances exposed on the command line."""
    DELTA = "delta"
    DELTA_S = "deltaS"
    DELTA_RHO = "deltaRho"


class Subcommand(str, Enum):
    """Experiment kinds."""
    GEN = "gen"
    STATS = "stats"
    DIST = "dist"
    PARTITION = "partition"
    LIMIT = "limit"
    SUBADD = "subadd"
    IDS = "ids"
    FEKETE = "fekete"


class DistanceEstimate(BaseModel):
    """A distance value with its kind and the witness that achieves it."""

    value: float = Field(ge=0.0, le=1.0)
    kind: EstimateKind
    witness: Optional[List[int]] = None
    multiples: Optional[Tuple[int, int]] = None

    model_config = ConfigDict(use_enum_values=True)

    @model_validator(mode="after")
    def validate_exact_witness(self):
        """Exact estimates must carry their witness."""
        if self.kind == EstimateKind.EXACT and self.witness is None:
            raise ValueError("exact estimates require a witness permutation")
        return self

    @property
    def is_exact(self) -> bool:
        return self.kind == EstimateKind.EXACT


class PairValue(BaseModel):
    """Distance between sequence members i < j."""

    i: int
    j: int
    value: float


class CauchyProfile(BaseModel):
    """Pairwise distances and the tail supremum per starting index."""

    pairs: List[PairValue] = Field(default_factory=list)
    tail_sup: List[float] = Field(default_factory=list)

    def converged_at(self, tolerance: float) -> Optional[int]:
        """First index m from which the tail supremum stays within tolerance."""
        compared = {pair.i for pair in self.pairs}
        for m, value in enumerate(self.tail_sup):
            if value <= tolerance and any(i >= m for i in compared):
                return m
        return None


class ManifestMember(BaseModel):
    """One sequence member: a generator spec or an edge-list path."""

    family: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    path: Optional[str] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def validate_source(self):
        """Exactly one of family and path must be given."""
        if (self.family is None) == (self.path is None):
            raise ValueError("member needs exactly one of 'family' or 'path'")
        return self


class SequenceManifest(BaseModel):
    """A graph sequence description with a shared degree bound."""

    d: int = Field(ge=1)
    members: List[ManifestMember] = Field(min_length=1)
    tags: Dict[str, str] = Field(default_factory=dict)
    allow_nonincreasing: bool = False

    model_config = ConfigDict(extra="forbid")

    @field_validator("tags")
    @classmethod
    def validate_tags(cls, v: Dict[str, str]) -> Dict[str, str]:
        """Validate the hyperfinite tag."""
        allowed = {tag.value for tag in HyperfiniteTag}
        if v.get("hyperfinite", HyperfiniteTag.UNKNOWN.value) not in allowed:
            raise ValueError(f"tags.hyperfinite must be one of: {', '.join(sorted(allowed))}")
        return v

    @property
    def hyperfinite_expected(self) -> HyperfiniteTag:
        return HyperfiniteTag(self.tags.get("hyperfinite", HyperfiniteTag.UNKNOWN.value))


class ExperimentConfig(BaseModel):
    """Complete, serializable description of one experiment run."""

    subcommand: Subcommand
    inputs: List[str] = Field(default_factory=list)
    manifest: Optional[str] = None
    output: Optional[str] = None
    output_dir: str = "reports"
    formats: List[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])

    # Generation
    family: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)

    # Numeric knobs
    radius: int = Field(default=2, ge=0)
    eps: float = Field(default=0.1, gt=0.0, le=1.0)
    eps1: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    tolerance: float = Field(default=1e-3, gt=0.0)
    multiple_cap: int = Field(default=3, ge=1)
    exact_limit: int = Field(default=10, ge=1, le=12)
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    max_pairs: int = Field(default=200, ge=1)
    restarts: int = Field(default=8, ge=0)
    sweeps: int = Field(default=50, ge=0)
    canonical_limit: int = Field(default=64, ge=1)
    component_limit: int = Field(default=512, ge=1)
    dense_limit: int = Field(default=4000, ge=1)
    eigenvalue_decimals: int = Field(default=9, ge=1, le=15)
    query_grid_points: int = Field(default=1000, ge=2)
    inertia_shift: float = Field(default=1e-9, gt=0.0, lt=1.0)
    floor: float = -1e6
    rejection_cap: int = Field(default=1000, ge=1)
    max_derived_seeds: int = Field(default=16, ge=1)

    # Selections
    metric: Metric = Metric.DELTA_S
    star_mode: StarMode = StarMode.INDUCED
    search_mode: Optional[SearchMode] = None
    strategy: PartitionStrategy = PartitionStrategy.AUTO
    max_component: Optional[int] = Field(default=None, ge=1)
    check: bool = False
    strict: bool = False
    functional: Optional[str] = None
    kernel: Optional[str] = None
    reference: Optional[str] = None

    model_config = ConfigDict(extra="forbid", use_enum_values=True)
