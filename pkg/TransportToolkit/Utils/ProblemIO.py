'''
JSON reading and writing of OT problems and plans:
{ "n": int, "cost": [n*n floats, row-major], "p": [n floats], "q": [n floats] }
with plans stored the same way under "plan".
'''
import json
import math
import numpy as np
from ..Core.Types import CostMatrix, SimplexVector, TransportPlan
from ..Core.Errors import ParseError
from . import PathParser


# CONSTANTS.
_PROBLEM_FIELDS = {'n', 'cost', 'p', 'q'}


def read_json(file_path: str):
    with open(PathParser.input_file(file_path, suffix='.json'), "r") as file:
        try:
            return json.load(file)
        except json.JSONDecodeError as e:
            raise ParseError(f"ProblemIO.read_json(): '{file_path}' is not valid JSON ({e.msg}, line {e.lineno}).") from None


def save_json(data: dict, file_path: str):
    # Keys are sorted and floats written by repr so reruns give byte-identical files.
    with open(PathParser.output_file(file_path, suffix='.json'), "w") as file:
        json.dump(data, file, sort_keys=True)
        file.write("\n")


def problem_from_dict(data: dict) -> tuple:
    '''
    Returns (C, p, q) from a problem dict. Marginals are validated, never
    renormalized.
    '''
    if not isinstance(data, dict):
        raise ParseError(f"ProblemIO.problem_from_dict(): expected a JSON object, got '{type(data).__name__}'.")
    missing = _PROBLEM_FIELDS.difference(data.keys())
    if missing:
        raise ParseError(f"ProblemIO.problem_from_dict(): Missing keys {sorted(missing)}.")
    n = data['n']
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"ProblemIO.problem_from_dict(): 'n' must be a positive integer, got {n!r}.")
    cost = _float_list(data['cost'], n * n, 'cost').reshape(n, n)
    p = _float_list(data['p'], n, 'p')
    q = _float_list(data['q'], n, 'q')
    return CostMatrix(cost), SimplexVector(p), SimplexVector(q)


def problem_to_dict(C: CostMatrix, p: SimplexVector, q: SimplexVector) -> dict:
    return {'n': C.n, 'cost': C.entries.ravel().tolist(), 'p': p.values.tolist(), 'q': q.values.tolist()}


def plan_to_dict(plan: TransportPlan, extra: dict = None) -> dict:
    return {'n': plan.n, 'plan': plan.entries.ravel().tolist(), **(extra or {})}


def load_problem(file_path: str) -> tuple:
    return problem_from_dict(read_json(file_path))


def save_problem(C: CostMatrix, p: SimplexVector, q: SimplexVector, file_path: str):
    save_json(problem_to_dict(C, p, q), file_path)


def _float_list(values, length: int, key: str) -> np.ndarray:
    if not isinstance(values, list) or len(values) != length:
        raise ParseError(f"ProblemIO: '{key}' must be a list of {length} numbers.")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in values):
        raise ParseError(f"ProblemIO: '{key}' must contain finite numbers only.")
    return np.asarray(values, dtype=np.float64)
