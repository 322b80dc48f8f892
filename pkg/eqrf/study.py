"""
Convergence and work-precision studies.

A study file is a JSON document naming a benchmark preset (with overrides),
a list of methods and a list of step counts. `run_study` computes one
reference solution, marches every (method, N) cell, and collects terminal
errors and wall-clock seconds into a `ConvergenceReport`, which writes a
CSV (`method,formulation,nodes,N,error,seconds`) and a JSON summary.
"""

import csv
import json
import logging
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from typing_extensions import Annotated, Doc

from eqrf.exceptions import FitError, StudySpecError
from eqrf.integrators.base import Method, TimeGrid, march
from eqrf.integrators.classical import CEQR2Stepper
from eqrf.integrators.fractional import EQRF1Stepper, EQRFStepper
from eqrf.operators import State
from eqrf.problems import BenchmarkProblem, ReferenceSolution, discretize, preset, reference_solution, terminal_error
from eqrf.quadrule import NodeSet, node_set
from eqrf.types import Formulation, MethodSummary, NodeFamily, PresetName, ReportRow, Scheme

logger = logging.getLogger(__name__)

CSV_HEADER = ["method", "formulation", "nodes", "N", "error", "seconds"]
MIN_FIT_POINTS = 3


class MethodSpec(BaseModel):
    """One time-marching method of a study, plus the order it is expected to show."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    label: Annotated[str, Field(min_length=1), Doc("Name used in the CSV `method` column, e.g. `EQRF2 GR`.")]
    scheme: Scheme
    c1: Annotated[Optional[float], Field(ge=0.0, le=1.0), Doc("Collocation point of EQRF1.")] = None
    family: Optional[NodeFamily] = None
    nu: Annotated[Optional[int], Field(ge=1)] = None
    nodes: Annotated[Optional[Tuple[float, ...]], Doc("Explicit points of the `custom` family.")] = None
    formulation: Formulation = "fractional_phi"
    n_quad: Annotated[int, Field(ge=1, le=64), Doc("Gauss points per panel of `integral_quadrature`.")] = 16
    graded: Annotated[bool, Doc("Grade the `integral_quadrature` panels toward the stiff end of each step.")] = True
    expected_order: Optional[float] = None
    order_tolerance: Annotated[float, Field(gt=0.0)] = 0.1
    fit_last: Annotated[
        Optional[int],
        Field(ge=MIN_FIT_POINTS),
        Doc("Fit the order on the finest `fit_last` step counts only (default: all)."),
    ] = None
    max_error: Annotated[Optional[float], Field(gt=0.0), Doc("Upper bound every terminal error must meet.")] = None

    @model_validator(mode="after")
    def _check_scheme(self) -> "MethodSpec":
        if self.scheme == "eqrf1" and self.c1 is None:
            raise ValueError("eqrf1 needs c1")
        if self.scheme in ("eqrf", "ceqr2") and self.family is None:
            raise ValueError(f"{self.scheme} needs a node family")
        if self.scheme == "ceqr2" and self.family != "custom" and self.nu not in (None, 2):
            raise ValueError("ceqr2 uses exactly two nodes")
        return self

    def node_set(self) -> NodeSet:
        if self.scheme == "eqrf1":
            return node_set("single", 1, c1=self.c1)
        assert self.family is not None
        nu = self.nu if self.nu is not None else (len(self.nodes) if self.nodes else 2)
        return node_set(self.family, nu, nodes=self.nodes)

    @property
    def report_formulation(self) -> str:
        if self.scheme == "ceqr2":
            return "classical"
        if self.scheme == "eqrf1":
            return "fractional_phi"
        return self.formulation

    def method(self) -> Method:
        if self.scheme == "eqrf1":
            assert self.c1 is not None
            return Method(EQRF1Stepper, c1=self.c1)
        if self.scheme == "ceqr2":
            return Method(CEQR2Stepper, nodes=self.node_set())
        return Method(
            EQRFStepper, nodes=self.node_set(), formulation=self.formulation, n_quad=self.n_quad, graded=self.graded
        )


class ProblemSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    preset: PresetName
    overrides: Dict[str, Any] = Field(default_factory=dict)

    def build(self) -> BenchmarkProblem:
        return preset(self.preset, **self.overrides)


class SpotCheck(BaseModel):
    """A published terminal error the study must reproduce within `rel_tol`."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: str
    N: Annotated[int, Field(ge=1)]
    error: Annotated[float, Field(gt=0.0)]
    rel_tol: Annotated[float, Field(gt=0.0)] = 0.02


class StudySpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Annotated[str, Field(min_length=1, pattern=r"^[A-Za-z0-9_.\-]+$")]
    description: str = ""
    problem: ProblemSpec
    methods: Annotated[List[MethodSpec], Field(min_length=1)]
    N: Annotated[List[int], Field(min_length=1), Doc("Step counts, strictly increasing.")]
    repetitions: Annotated[int, Field(ge=1), Doc("Timed repetitions per cell; the median is reported.")] = 1
    reference_tol: Annotated[float, Field(gt=0.0)] = 1e-12
    spot_checks: List[SpotCheck] = Field(default_factory=list)

    @field_validator("N")
    @classmethod
    def _increasing(cls, value: List[int]) -> List[int]:
        if value[0] < 1 or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("N must be positive and strictly increasing")
        return value

    @model_validator(mode="after")
    def _check_references(self) -> "StudySpec":
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ValueError("method labels must be unique")
        for spot in self.spot_checks:
            if spot.method not in labels or spot.N not in self.N:
                raise ValueError(f"spot check ({spot.method}, N={spot.N}) is not part of the study")
        return self


def parse_studies(document: Any, source: Any = None) -> List[StudySpec]:
    """A single study object, or `{"studies": [...]}`."""
    items = document["studies"] if isinstance(document, dict) and "studies" in document else [document]
    studies = []
    for index, item in enumerate(items):
        try:
            studies.append(StudySpec.model_validate(item))
        except ValidationError as exc:
            errors = [{**error, "loc": ("studies", index, *error["loc"])} for error in exc.errors()]
            raise StudySpecError(errors, source=source) from exc
    return studies


def load_studies(path: Union[str, Path]) -> List[StudySpec]:
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise StudySpecError([{"loc": (str(path),), "msg": f"invalid JSON: {exc}"}], source=path) from exc
    return parse_studies(document, source=path)


def fit_order(rows: Iterable[Union[Tuple[int, float], ReportRow]]) -> Tuple[float, float]:
    """
    Least-squares order p of error ~ C N^-p on log10 scales.

    Returns (p, residual) where residual is the root-mean-square deviation
    of log10(error) from the fitted line.
    """
    pairs = [(row["N"], row["error"]) if isinstance(row, dict) else (row[0], row[1]) for row in rows]
    if len(pairs) < MIN_FIT_POINTS:
        raise FitError(f"order fit needs at least {MIN_FIT_POINTS} points, got {len(pairs)}")
    steps = np.array([float(n) for n, _ in pairs])
    errors = np.array([float(e) for _, e in pairs])
    if np.any(steps <= 0.0) or np.unique(steps).size != steps.size:
        raise FitError("order fit needs distinct positive step counts")
    if not np.all(np.isfinite(errors)) or np.any(errors <= 0.0):
        raise FitError("order fit needs finite positive errors")
    x, y = np.log10(steps), np.log10(errors)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(-slope) + 0.0, residual


@dataclass
class ConvergenceReport:
    study: str
    rows: List[ReportRow]
    summary: Dict[str, MethodSummary] = field(default_factory=dict)
    reference_method: str = ""
    reference_accuracy: float = math.nan
    states: Dict[Tuple[str, int], State] = field(default_factory=dict, repr=False)

    def series(self, method: str) -> List[Tuple[int, float]]:
        return [(row["N"], row["error"]) for row in self.rows if row["method"] == method]

    def error(self, method: str, N: int) -> float:
        for row in self.rows:
            if row["method"] == method and row["N"] == N:
                return row["error"]
        raise KeyError((method, N))

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with path.open("w", newline="") as stream:
            writer = csv.DictWriter(stream, fieldnames=CSV_HEADER)
            writer.writeheader()
            for row in self.rows:
                # repr keeps floats bit-exact through a read_csv round trip
                writer.writerow({key: repr(value) if isinstance(value, float) else value for key, value in row.items()})
        return path

    @classmethod
    def read_csv(cls, path: Union[str, Path], study: Optional[str] = None) -> "ConvergenceReport":
        path = Path(path)
        with path.open(newline="") as stream:
            reader = csv.DictReader(stream)
            if reader.fieldnames != CSV_HEADER:
                raise StudySpecError([{"loc": (str(path),), "msg": f"unexpected CSV header {reader.fieldnames}"}])
            rows = [
                ReportRow(
                    method=record["method"],
                    formulation=record["formulation"],
                    nodes=record["nodes"],
                    N=int(record["N"]),
                    error=float(record["error"]),
                    seconds=float(record["seconds"]),
                )
                for record in reader
            ]
        return cls(study=study or path.stem, rows=rows)

    def summary_document(self) -> Dict[str, Any]:
        return {
            "study": self.study,
            "reference": {"method": self.reference_method, "accuracy": self.reference_accuracy},
            "methods": self.summary,
        }

    def write(self, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = self.write_csv(out_dir / f"{self.study}.csv")
        json_path = out_dir / f"{self.study}.json"
        json_path.write_text(json.dumps(self.summary_document(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path


def summarize(rows: Sequence[ReportRow], methods: Sequence[MethodSpec]) -> Dict[str, MethodSummary]:
    """Fitted order, expected order and pass/fail per method."""
    summary: Dict[str, MethodSummary] = {}
    for spec in methods:
        own = [row for row in rows if row["method"] == spec.label]
        entry = MethodSummary(median_seconds=statistics.median(row["seconds"] for row in own)) if own else {}
        fit_rows = own[-spec.fit_last :] if spec.fit_last else own
        passed = True
        if len(fit_rows) >= MIN_FIT_POINTS:
            try:
                slope, residual = fit_order(fit_rows)
            except FitError as exc:
                logger.warning("%s: no order fit (%s)", spec.label, exc)
            else:
                entry["slope"] = slope
                entry["residual"] = residual
                if spec.expected_order is not None:
                    passed = abs(slope - spec.expected_order) <= spec.order_tolerance
        if spec.expected_order is not None:
            entry["expected_order"] = spec.expected_order
            passed = passed and "slope" in entry
        if spec.max_error is not None:
            passed = passed and all(row["error"] <= spec.max_error for row in own)
        entry["passed"] = passed
        summary[spec.label] = entry
    return summary


def run_study(
    spec: StudySpec,
    debug: bool = False,
    reference: Optional[ReferenceSolution] = None,
    keep_states: bool = False,
) -> ConvergenceReport:
    """
    March every (method, N) cell of `spec` and compare with one reference solution.

    Operator construction and the reference are outside the timed region;
    each cell is timed `spec.repetitions` times and the median is kept.
    With `keep_states` the terminal state of every cell is kept on the report.
    """
    problem = spec.problem.build()
    setup = discretize(problem)
    if reference is None:
        reference = reference_solution(setup, tol=spec.reference_tol)

    rows: List[ReportRow] = []
    states: Dict[Tuple[str, int], State] = {}
    for method_spec in spec.methods:
        method = method_spec.method()
        label = method_spec.node_set().label
        for N in spec.N:
            grid = TimeGrid(problem.T, N)
            timings = []
            for _ in range(spec.repetitions):
                start = time.perf_counter()
                state = march(setup.initial, setup.op, setup.source, grid, method, debug=debug)
                timings.append(time.perf_counter() - start)
            error = terminal_error(state, reference)
            if keep_states:
                states[(method_spec.label, N)] = state
            seconds = statistics.median(timings)
            logger.info("%s: %s N=%d error=%.6e seconds=%.4f", spec.name, method_spec.label, N, error, seconds)
            rows.append(
                ReportRow(
                    method=method_spec.label,
                    formulation=method_spec.report_formulation,
                    nodes=label,
                    N=N,
                    error=error,
                    seconds=seconds,
                )
            )

    return ConvergenceReport(
        study=spec.name,
        rows=rows,
        summary=summarize(rows, spec.methods),
        reference_method=reference.method,
        reference_accuracy=reference.accuracy,
        states=states,
    )
