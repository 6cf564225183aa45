from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Optional, List, Dict, Literal


# Scenario document models
class DomainDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["rectangle", "disk"]
    params: List[float]  # rectangle: [xmin, ymin, xmax, ymax]; disk: [cx, cy, radius]

    @field_validator("params")
    @classmethod
    def check_param_count(cls, params, info):
        expected = 4 if info.data.get("kind") == "rectangle" else 3
        if len(params) != expected:
            raise ValueError(f"expected {expected} domain params, got {len(params)}")
        return params


class SensorDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    fence: bool = False
    waypoints: List[List[float]]  # [[t, x, y], ...]

    @field_validator("waypoints")
    @classmethod
    def check_waypoint_shape(cls, waypoints):
        if not waypoints:
            raise ValueError("at least one waypoint is required")
        for row in waypoints:
            if len(row) != 3:
                raise ValueError(f"waypoint must be [t, x, y], got {row}")
        return waypoints


class ScenarioDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    domain: DomainDocument
    sensor_radius: float = Field(default=1.0, gt=0)
    sensors: List[SensorDocument]


# Event stream models
class TimeGridDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    event_times: List[float]
    sample_times: List[float]


class EventDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: float
    op: Literal["add", "remove", "flip"]
    simplices: List[List[str]]  # removed simplices for a flip
    added: Optional[List[List[str]]] = None  # flip only
    kind: Optional[str] = None  # alpha event type
    rotations: Optional[Dict[str, List[str]]] = None  # vertex -> clockwise neighbours


class EventStreamDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    complex: Literal["cech", "vr", "alpha"] = "cech"
    grid: TimeGridDocument
    initial: List[List[str]]
    initial_rotations: Optional[Dict[str, List[str]]] = None
    fence: List[str] = []
    outer: Optional[List[List[str]]] = None  # directed edges of the outer boundary cycle
    events: List[EventDocument]


# Result models
class BarcodeDocument(BaseModel):
    n: int
    degree: int
    field: int
    intervals: List[List[int]]
    slot_times: List[float] = []


class WitnessDocument(BaseModel):
    verdict: Literal["evasion", "no_evasion"]
    h: float
    dt: float
    stable: Optional[bool] = None
    warnings: List[str] = []
    witness: List[List[float]] = []


class ReebNodeDocument(BaseModel):
    id: int
    t_start: float
    t_end: float
    cycle: str
    label: bool


class ReebGraphDocument(BaseModel):
    verdict: Literal["evasion_exists", "no_evasion"]
    nodes: List[ReebNodeDocument]
    edges: List[List[int]]


class CriterionVerdict(BaseModel):
    criterion: str
    verdict: str
    necessary_only: bool
    detail: Dict[str, float] = {}


class AnalysisReport(BaseModel):
    scenario: str
    digest: str
    verdicts: List[CriterionVerdict]
    barcodes: Dict[str, BarcodeDocument] = {}
    disagreements: List[str] = []
    parameters: Dict[str, float] = {}
    timings: Optional[Dict[str, float]] = None


class SuiteRow(BaseModel):
    scenario: str
    verdicts: Dict[str, str]
    violations: List[str] = []


class SuiteReport(BaseModel):
    rows: List[SuiteRow]
    implications: Dict[str, str]
    violation_count: int
