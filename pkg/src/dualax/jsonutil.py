"""
Summary:
JSON and CSV codecs for states, matrices, unreduced points and duality
results, plus atomic file output. Incoming JSON is validated by pydantic
schemas and then by the domain constructors (chamber, shapes, finiteness),
so a file that loads is a file the library accepts.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator
from pydantic import ValidationError as PydanticValidationError

from dualax.duality import DualityResult
from dualax.errors import ConfigError, ValidationError
from dualax.models import RSState, State, SutherlandState
from dualax.reduction import UnreducedPoint

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MatrixModel(_Strict):
    """{"n": int, "re": [[...]], "im": [[...]]}, row-major."""
    n: int = Field(ge=1)
    re: list[list[FiniteFloat]]
    im: list[list[FiniteFloat]]

    @model_validator(mode="after")
    def _square(self) -> "MatrixModel":
        for part in (self.re, self.im):
            if len(part) != self.n or any(len(row) != self.n for row in part):
                raise ValueError(f"matrix parts must be {self.n}x{self.n}")
        return self

    @classmethod
    def from_array(cls, a: np.ndarray) -> "MatrixModel":
        a = np.asarray(a, dtype=np.complex128)
        return cls(n=a.shape[0], re=a.real.tolist(), im=a.imag.tolist())

    def to_array(self) -> np.ndarray:
        return np.asarray(self.re, dtype=np.float64) + 1j * np.asarray(self.im, dtype=np.float64)


class VectorModel(_Strict):
    re: list[FiniteFloat]
    im: list[FiniteFloat]

    @model_validator(mode="after")
    def _same_length(self) -> "VectorModel":
        if len(self.re) != len(self.im):
            raise ValueError("vector parts must have equal length")
        return self

    @classmethod
    def from_array(cls, v: np.ndarray) -> "VectorModel":
        v = np.asarray(v, dtype=np.complex128)
        return cls(re=v.real.tolist(), im=v.imag.tolist())

    def to_array(self) -> np.ndarray:
        return np.asarray(self.re, dtype=np.float64) + 1j * np.asarray(self.im, dtype=np.float64)


class _StateBase(_Strict):
    n: int = Field(ge=1)
    kappa: Optional[FiniteFloat] = None

    def _check_lengths(self, *parts: list[float]) -> None:
        if any(len(x) != self.n for x in parts):
            raise ValueError(f"coordinate vectors must have length n={self.n}")


class SutherlandStateModel(_StateBase):
    model: Literal["sutherland"]
    q: list[FiniteFloat]
    p: list[FiniteFloat]

    @model_validator(mode="after")
    def _lengths(self) -> "SutherlandStateModel":
        self._check_lengths(self.q, self.p)
        return self

    def to_state(self) -> SutherlandState:
        return SutherlandState(q=self.q, p=self.p)


class RSStateModel(_StateBase):
    model: Literal["rs"]
    p_hat: list[FiniteFloat]
    q_hat: list[FiniteFloat]

    @model_validator(mode="after")
    def _lengths(self) -> "RSStateModel":
        self._check_lengths(self.p_hat, self.q_hat)
        return self

    def to_state(self) -> RSState:
        return RSState(p_hat=self.p_hat, q_hat=self.q_hat)


StateModel = Annotated[Union[SutherlandStateModel, RSStateModel], Field(discriminator="model")]
_STATE_ADAPTER: TypeAdapter = TypeAdapter(StateModel)


class PointModel(_Strict):
    """{"g": matrix, "J": matrix, "v": {"re": [...], "im": [...]}}."""
    g: MatrixModel
    J: MatrixModel
    v: VectorModel

    def to_point(self) -> UnreducedPoint:
        return UnreducedPoint(g=self.g.to_array(), J=self.J.to_array(), v=self.v.to_array())

    @classmethod
    def from_point(cls, pt: UnreducedPoint) -> "PointModel":
        return cls(g=MatrixModel.from_array(pt.g), J=MatrixModel.from_array(pt.J), v=VectorModel.from_array(pt.v))


def _pydantic_message(e: PydanticValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(x) for x in first.get("loc", ())) or "<root>"
    return f"{where}: {first.get('msg', 'invalid value')} ({e.error_count()} error(s))"


def _parse_json(text: str) -> Any:
    """
    Summary:
    Strict JSON parse: NaN/Infinity literals are rejected, errors become ValidationError.
    """
    def _reject(token: str) -> float:
        raise ValidationError(f"non-finite JSON number {token!r}")

    try:
        return json.loads(text, parse_constant=_reject)
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON: {e}") from e


def load_state(text: str) -> tuple[State, Optional[float]]:
    """Parse a state document; returns the domain state and the file's kappa (if any)."""
    try:
        model = _STATE_ADAPTER.validate_python(_parse_json(text))
    except PydanticValidationError as e:
        raise ValidationError(f"invalid state file: {_pydantic_message(e)}") from e
    return model.to_state(), model.kappa


def state_to_dict(s: State, kappa: Optional[float] = None) -> dict[str, Any]:
    doc: dict[str, Any] = {"model": s.MODEL, "n": s.n}
    if kappa is not None:
        doc["kappa"] = float(kappa)
    if isinstance(s, SutherlandState):
        doc.update(q=s.q.tolist(), p=s.p.tolist())
    else:
        doc.update(p_hat=s.p_hat.tolist(), q_hat=s.q_hat.tolist())
    return doc


class DualityResultModel(_Strict):
    """Mapped state with the K element (eta_L, eta_R) and residual diagnostics."""
    direction: Literal["s1-to-s2", "s2-to-s1"]
    state: StateModel
    eta_L: MatrixModel
    eta_R: MatrixModel
    residuals: dict[str, FiniteFloat]


def duality_to_dict(result: DualityResult, kappa: float) -> dict[str, Any]:
    direction = "s1-to-s2" if isinstance(result.state, RSState) else "s2-to-s1"
    model = DualityResultModel(
        direction=direction,
        state=_STATE_ADAPTER.validate_python(state_to_dict(result.state, kappa)),
        eta_L=MatrixModel.from_array(result.transform.eta_L),
        eta_R=MatrixModel.from_array(result.transform.eta_R),
        residuals=result.residuals,
    )
    return model.model_dump(exclude_none=True)


def load_point(text: str) -> UnreducedPoint:
    try:
        return PointModel.model_validate(_parse_json(text)).to_point()
    except PydanticValidationError as e:
        raise ValidationError(f"invalid point file: {_pydantic_message(e)}") from e


def point_to_dict(pt: UnreducedPoint) -> dict[str, Any]:
    return PointModel.from_point(pt).model_dump()


def matrix_to_dict(a: np.ndarray) -> dict[str, Any]:
    return MatrixModel.from_array(a).model_dump()


def dumps(doc: Any) -> str:
    # repr-based float output is the shortest string that round-trips the double exactly
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")


def write_atomic(path: Path, text: str) -> None:
    """Write to a temporary file next to `path`, then rename over it. I/O failures become ConfigError."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    except OSError as e:
        raise ConfigError(f"cannot write output {path}: {e.strerror or e}") from e
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException as e:
        if os.path.exists(tmp):
            os.unlink(tmp)
        if isinstance(e, OSError):
            raise ConfigError(f"cannot write output {path}: {e.strerror or e}") from e
        raise


def emit(text: str, output: Optional[Path]) -> None:
    """Write the complete output to `output` atomically, or to stdout."""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_atomic(output, text)
