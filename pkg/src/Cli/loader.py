import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from pydantic import ValidationError

from src.BayesNet.lib import build_scenario, compose_incremental, make_time_point
from src.constants import SCENARIO_FILE_VERSION, NamedBasis, NamedModel, NamedUnitary
from src.Cli.models import (
    AdiabaticPhaseSpec,
    LoadedScenario,
    MatrixSpec,
    ModelSpec,
    ScenarioFile,
    TimeSpec,
)
from src.errors import ScenarioParseError
from src.Models.lib import (
    adiabatic_phase,
    coherent_qubit_scenario,
    coherent_qubit_state,
    pair_scenario,
    pair_state,
    partial_swap,
)
from src.Models.models import CoherentQubitParams, QubitPairParams
from src.QState.lib import computational_basis, validate_density
from src.QState.models import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

Location = Sequence[str | int]


def _node_line(root: Optional[yaml.Node], location: Location) -> Optional[int]:
    """1-based line of the deepest node reachable along a pydantic error location"""
    node, line = root, None
    if node is not None:
        line = node.start_mark.line + 1
    for item in location:
        if isinstance(node, yaml.MappingNode) and isinstance(item, str):
            matches = [value for key, value in node.value if key.value == item]
            if not matches:
                continue
            node = matches[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(item, int):
            if not 0 <= item < len(node.value):
                continue
            node = node.value[item]
        else:
            continue
        line = node.start_mark.line + 1
    return line


def _field(location: Location) -> str:
    return ".".join(str(item) for item in location)


def _parse_yaml(text: str) -> Tuple[Any, Optional[yaml.Node]]:
    try:
        return yaml.safe_load(text), yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ScenarioParseError(
            str(getattr(e, "problem", None) or e),
            line=mark.line + 1 if mark is not None else None,
        ) from e


def _check_rectangular(
    rows: List[List[Any]], location: Location, root: Optional[yaml.Node], square: bool
) -> None:
    width = len(rows) if square else len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            where = [*location, i]
            raise ScenarioParseError(
                f"row has {len(row)} entries, expected {width}",
                line=_node_line(root, where),
                field=_field(where),
            )


def _complex(pairs: List[List[Tuple[float, float]]]) -> np.ndarray:
    array = np.asarray(pairs, dtype=np.float64)
    return array[..., 0] + 1j * array[..., 1]


def _qubit_count(dims: Sequence[int], what: str, location: Location, root) -> int:
    if any(d != 2 for d in dims):
        raise ScenarioParseError(
            f"{what} needs qubit factors, got dims {list(dims)}",
            line=_node_line(root, location),
            field=_field(location),
        )
    return len(dims)


def _unitary(spec: TimeSpec, dims: Sequence[int], location: Location, root) -> np.ndarray:
    dim = math.prod(dims)
    match spec.unitary:
        case NamedUnitary.IDENTITY:
            return np.eye(dim, dtype=np.complex128)
        case NamedUnitary.PARTIAL_SWAP:
            if _qubit_count(dims, "partial_swap", location, root) != 2:
                raise ScenarioParseError(
                    "partial_swap acts on exactly two qubits",
                    line=_node_line(root, location),
                    field=_field(location),
                )
            return partial_swap()
        case AdiabaticPhaseSpec(adiabatic_phase=phi):
            return adiabatic_phase(phi, _qubit_count(dims, "adiabatic_phase", location, root))
        case MatrixSpec(matrix=rows):
            _check_rectangular(rows, [*location, "matrix"], root, square=True)
            return _complex(rows)


def _basis(spec: TimeSpec, dims: Sequence[int], location: Location, root) -> np.ndarray:
    match spec.basis:
        case NamedBasis.COMPUTATIONAL:
            return computational_basis(math.prod(dims))
        case NamedBasis.SIGMA_Z_PRODUCT:
            _qubit_count(dims, "sigma_z_product", location, root)
            return computational_basis(math.prod(dims))
        case _:
            vectors = spec.basis.vectors
            _check_rectangular(vectors, [*location, "vectors"], root, square=True)
            return _complex(vectors).T


def _time_points(
    document: ScenarioFile, dims: Sequence[int], tolerances: Tolerances, root
):
    unitaries, bases = [], []
    for k, spec in enumerate(document.times):
        unitaries.append(_unitary(spec, dims, ["times", k, "unitary"], root))
        bases.append(_basis(spec, dims, ["times", k, "basis"], root))
    for k, (unitary, basis) in enumerate(zip(unitaries, bases)):
        for name, array in (("unitary", unitary), ("basis", basis)):
            if array.shape[0] != math.prod(dims):
                raise ScenarioParseError(
                    f"{name} has dimension {array.shape[0]}, expected {math.prod(dims)}",
                    line=_node_line(root, ["times", k, name]),
                    field=f"times.{k}.{name}",
                )
    if document.options.incremental:
        unitaries = compose_incremental(unitaries)
    return [
        make_time_point(spec.label, unitary, basis, tolerances)
        for spec, unitary, basis in zip(document.times, unitaries, bases)
    ]


def _model_params(spec: ModelSpec, root) -> CoherentQubitParams | QubitPairParams:
    model = (
        CoherentQubitParams
        if spec.model == NamedModel.COHERENT_QUBIT
        else QubitPairParams
    )
    try:
        return model.model_validate(spec.params)
    except ValidationError as e:
        error = e.errors()[0]
        where = ["rho", "params", *error["loc"]]
        raise ScenarioParseError(
            error["msg"], line=_node_line(root, where), field=_field(where)
        ) from e


def _model_defaults(
    params: CoherentQubitParams | QubitPairParams,
) -> Tuple[Tuple[float, ...], Tuple[float, ...], Optional[float]]:
    """Energies of the model Hamiltonians and beta when the state is thermal"""
    if isinstance(params, CoherentQubitParams):
        beta = params.beta if params.a == 0 else None
        return params.energies_initial, params.energies_final, beta
    beta = params.beta_a if params.a == 0 and params.beta_a == params.beta_b else None
    return params.energies, params.energies, beta


def _merge_tolerances(
    profile: Tolerances, from_file: Dict[str, Any], flags: Dict[str, Any], root
) -> Tolerances:
    """Flags beat the file, the file beats the profile"""
    values = {**profile.model_dump(), **from_file}
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return Tolerances.model_validate(values)
    except ValidationError as e:
        error = e.errors()[0]
        where = ["options", "tolerances", *error["loc"]]
        raise ScenarioParseError(
            error["msg"], line=_node_line(root, where), field=_field(where)
        ) from e


def parse_scenario(
    text: str,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    overrides: Optional[Dict[str, Any]] = None,
    source: str = "<string>",
) -> LoadedScenario:
    """
    Parse a YAML scenario document into a validated scenario.

    Raises:
        ScenarioParseError: malformed YAML or schema violations, with line and field
        ValidationFailure: the numbers parse but fail a physical check
    """
    data, root = _parse_yaml(text)
    if not isinstance(data, dict):
        raise ScenarioParseError("a scenario file must be a mapping", line=1)
    try:
        document = ScenarioFile.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        raise ScenarioParseError(
            error["msg"], line=_node_line(root, error["loc"]), field=_field(error["loc"])
        ) from e
    logger.debug(f"Parsed scenario file version {SCENARIO_FILE_VERSION} from {source}")

    tolerances = _merge_tolerances(
        tolerances, document.options.tolerances, overrides or {}, root
    )
    energies_initial = energies_final = beta = None

    if isinstance(document.rho, ModelSpec):
        params = _model_params(document.rho, root)
        energies_initial, energies_final, beta = _model_defaults(params)
        dims = [2] if isinstance(params, CoherentQubitParams) else [2, 2]
        if document.times is None:
            factory = (
                coherent_qubit_scenario
                if isinstance(params, CoherentQubitParams)
                else pair_scenario
            )
            scenario = factory(params, tolerances)
        else:
            state = (
                coherent_qubit_state(params)
                if isinstance(params, CoherentQubitParams)
                else pair_state(params)
            )
            scenario = build_scenario(
                dims,
                validate_density(state, tolerances),
                _time_points(document, dims, tolerances, root),
                tolerances,
                document.options.allow_initial_evolution,
            )
    else:
        rows = document.rho.matrix
        _check_rectangular(rows, ["rho", "matrix"], root, square=True)
        dims = document.dims or [len(rows)]
        if math.prod(dims) != len(rows):
            raise ScenarioParseError(
                f"dims {dims} do not factor dimension {len(rows)}",
                line=_node_line(root, ["dims"]),
                field="dims",
            )
        if document.times is None:
            raise ScenarioParseError(
                "times are required unless rho names a model",
                line=_node_line(root, []),
                field="times",
            )
        scenario = build_scenario(
            dims,
            _complex(rows),
            _time_points(document, dims, tolerances, root),
            tolerances,
            document.options.allow_initial_evolution,
        )

    if document.energies is not None:
        energies_initial = tuple(document.energies.initial)
        energies_final = tuple(document.energies.final)
    if document.beta is not None:
        beta = document.beta
    return LoadedScenario(
        scenario=scenario,
        energies_initial=energies_initial,
        energies_final=energies_final,
        beta=beta,
        source=source,
    )


def load_scenario(
    path: Path,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    overrides: Optional[Dict[str, Any]] = None,
) -> LoadedScenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read {path}: {e}") from e
    return parse_scenario(text, tolerances, overrides, source=str(path))
