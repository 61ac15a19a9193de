import os
import json

import numpy as np
import yaml

from src.errors import InputError
from src.instrument import Apparatus, Instrument, MeasuringProcess
from src.states import State

CONFIG_KEYS = ("k", "levels", "flavor", "d", "copies", "shots", "seed", "state")


def to_jsonable(obj):
    """
    Convert numpy scalars and arrays (recursively) into plain JSON values.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def load_json(path):
    """
    Load a JSON file, raising InputError when it is missing or malformed.
    """
    if not os.path.exists(path):
        raise InputError(f"{path} does not exist")
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"Error loading {path}: {e}") from e


def save_json(data, path):
    """
    Write data as indented JSON. Output depends only on data, so reruns with
    identical inputs produce identical files.
    """
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(data), f, indent=2, ensure_ascii=False)
        f.write("\n")


def load_config(path):
    """
    Scenario configuration from a YAML (or JSON) file; only CONFIG_KEYS are allowed.
    """
    if not os.path.exists(path):
        raise InputError(f"{path} does not exist")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise InputError(f"Error loading {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InputError(f"{path} must hold a mapping, got {type(data).__name__}")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise InputError(f"unknown configuration keys in {path}: {', '.join(unknown)}")
    return data


def matrix_to_dict(m):
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_dict(data, name="matrix"):
    try:
        rows, cols, entries = int(data["rows"]), int(data["cols"]), data["data"]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{name} needs integer rows, cols and a data list") from e
    if rows < 0 or cols < 0:
        raise InputError(f"{name} has negative shape {rows}x{cols}")
    if len(entries) != rows * cols:
        raise InputError(f"{name} declares {rows}x{cols} but has {len(entries)} entries")
    try:
        values = np.array([complex(float(re), float(im)) for re, im in entries], dtype=complex)
    except (TypeError, ValueError) as e:
        raise InputError(f"{name} entries must be [re, im] pairs") from e
    if not np.all(np.isfinite(values)):
        raise InputError(f"{name} has non-finite entries")
    return values.reshape(rows, cols)


def state_to_dict(s):
    return {"dim": s.dim, "density": matrix_to_dict(s.density)}


def state_from_dict(data):
    try:
        dim = int(data["dim"])
        density = matrix_from_dict(data["density"], "density")
    except (KeyError, TypeError) as e:
        raise InputError("state needs dim and density") from e
    if density.shape != (dim, dim):
        raise InputError(f"state declares dim {dim} but density is {density.shape}")
    return State(density)


def instrument_to_dict(E):
    return {
        "dim": E.observed_dim,
        "outcomes": [{"label": label, "choi": matrix_to_dict(c)} for label, c in zip(E.labels, E.chois)],
    }


def instrument_from_dict(data):
    try:
        dim = int(data["dim"])
        outcomes = data["outcomes"]
        labels = [str(o["label"]) for o in outcomes]
        chois = [matrix_from_dict(o["choi"], f"choi of {o['label']}") for o in outcomes]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError("instrument needs dim and a list of labeled Choi matrices") from e
    if not chois:
        raise InputError("instrument has no outcomes")
    for label, c in zip(labels, chois):
        if c.shape != (dim * dim, dim * dim):
            raise InputError(f"Choi matrix of {label} is {c.shape}, expected {dim * dim}x{dim * dim}")
    return Instrument(dim, np.array(chois), tuple(labels))


def process_to_dict(p):
    data = {
        "observed_dim": p.observed_dim,
        "probe_dim": p.probe_dim,
        "apparatus_vector": [[float(z.real), float(z.imag)] for z in p.phi_vector],
        "projections": [matrix_to_dict(e) for e in p.projections],
        "interaction": matrix_to_dict(p.interaction),
        "labels": list(p.labels),
    }
    if p.apparatus is not None:
        a = p.apparatus
        data["apparatus"] = {"k": a.k, "levels": a.level, "flavor": a.flavor}
    return data


def process_from_dict(data):
    try:
        d = int(data["observed_dim"])
        omega = np.array([complex(re, im) for re, im in data["apparatus_vector"]])
        projections = [matrix_from_dict(e, "projection") for e in data["projections"]]
        u = matrix_from_dict(data["interaction"], "interaction")
        labels = tuple(data.get("labels", ()))
        apparatus = data.get("apparatus")
    except (KeyError, TypeError, ValueError) as e:
        raise InputError("process needs observed_dim, apparatus_vector, projections and interaction") from e
    if apparatus is not None:
        apparatus = Apparatus(int(apparatus["k"]), int(apparatus["levels"]), apparatus.get("flavor", "natural"))
    return MeasuringProcess(d, omega, tuple(projections), u, apparatus, labels)


def _parse_complex(token):
    text = token.strip().replace(" ", "").replace("i", "j")
    if not text:
        raise InputError("empty entry in state literal")
    try:
        return complex(text)
    except ValueError as e:
        raise InputError(f"cannot read {token!r} as a complex number") from e


def parse_state(literal, dim=None):
    """
    State from a command-line literal: diag:p1,p2,... for a diagonal density or
    vec:a1,a2,... for the vector state of the normalized vector (entries may be
    complex, e.g. 0.5+0.5i).
    """
    if not isinstance(literal, str) or ":" not in literal:
        raise InputError(f"state literal must look like diag:... or vec:..., got {literal!r}")
    kind, _, body = literal.partition(":")
    entries = [_parse_complex(t) for t in body.split(",")]
    if dim is not None and len(entries) != dim:
        raise InputError(f"state literal has {len(entries)} entries, expected {dim}")
    if kind == "diag":
        if any(abs(z.imag) > 0 for z in entries):
            raise InputError("diag: entries must be real")
        p = np.array([z.real for z in entries])
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise InputError(f"diag: entries must be non-negative and sum to 1, got {p.tolist()}")
        return State(np.diag(p / p.sum()).astype(complex))
    if kind == "vec":
        v = np.array(entries, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InputError("vec: literal is the zero vector")
        v = v / norm
        return State(np.outer(v, v.conj()))
    raise InputError(f"unknown state literal kind {kind!r}")
