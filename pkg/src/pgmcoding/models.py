"""Validated model types and their JSON file format.

File format (complex entries are ``[re, im]`` pairs, matrices row-major)::

    {"kind": "density", "matrix": [[[re, im], ...], ...]}
    {"kind": "cq-channel", "dimB": d,
     "inputs": [{"symbol": "0", "prior": 0.5, "state": <matrix>}, ...]}
    {"kind": "kraus-channel", "in_dim": a, "out_dim": b, "kraus": [<matrix>, ...]}
    {"kind": "precoder", "u_prior": {"u0": 0.5, ...}, "v_prior": {...},
     "map": {"u0|v0": "x", ...}}

Composite symbols (MAC input pairs, channel-state pairs) are written either
as ``"x|y"`` or as a list ``["x", "y"]``; both parse to the label ``"x|y"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .errors import CompletenessViolation, ParseError, PartialPrecoder, ShapeMismatch, ValidationError
from .operators import (
    PSD_TOL,
    ShapeLike,
    _as_shape,
    as_hermitian,
    direct_sum,
    support_projector,
    tensor_product,
)

TRACE_TOL = 1e-9
PRIOR_TOL = 1e-12
COMPLETENESS_TOL = 1e-9
LABEL_SEP = "|"


def join_label(parts: Sequence[str]) -> str:
    return LABEL_SEP.join(str(p) for p in parts)


def split_label(label: str) -> tuple[str, ...]:
    return tuple(label.split(LABEL_SEP))


def _validated_density(a: ArrayLike, path: str) -> np.ndarray:
    m = as_hermitian(a, path)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError("trace is not 1", path=path, deviation=abs(tr - 1.0))
    w = np.linalg.eigvalsh(m)
    if w[0] < -PSD_TOL:
        raise ValidationError("negative eigenvalue", path=path, deviation=float(-w[0]))
    return m


def _validated_prior(prior: ArrayLike, path: str) -> np.ndarray:
    p = np.array(prior, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValidationError("prior is empty", path=path)
    if not np.all(np.isfinite(p)):
        raise ValidationError("prior has non-finite entries", path=path)
    if np.any(p < 0):
        i = int(np.argmin(p))
        raise ValidationError("negative prior entry", path=f"{path}[{i}]", deviation=float(-p[i]))
    dev = abs(float(p.sum()) - 1.0)
    if dev > PRIOR_TOL:
        raise ValidationError("prior does not sum to 1", path=path, deviation=dev)
    return p


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DensityOperator:
    """Unit-trace PSD operator (trace within 1e-9, eigenvalues >= -1e-10)."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _readonly(_validated_density(self.matrix, "density")))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def support(self) -> np.ndarray:
        return support_projector(self.matrix)

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.matrix, dtype=dtype)
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class CQChannel:
    """Classical-quantum channel ``x -> rho_B^x`` together with an input prior.

    Zero-mass symbols are kept here; channel-coding routines drop them and
    source-coding routines reject them.
    """

    alphabet: tuple[str, ...]
    prior: np.ndarray
    outputs: tuple[np.ndarray, ...]

    def __post_init__(self):
        alphabet = tuple(str(a) for a in self.alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise ValidationError("duplicate symbols in alphabet", path="alphabet")
        prior = _validated_prior(self.prior, "prior")
        if len(prior) != len(alphabet) or len(self.outputs) != len(alphabet):
            raise ValidationError("alphabet, prior and outputs differ in length")
        outputs = tuple(_readonly(_validated_density(o, f"outputs[{i}]"))
                        for i, o in enumerate(self.outputs))
        dims = {o.shape[0] for o in outputs}
        if len(dims) != 1:
            raise ValidationError(f"outputs have different dimensions {sorted(dims)}", path="outputs")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "prior", _readonly(prior))
        object.__setattr__(self, "outputs", outputs)

    @classmethod
    def from_states(cls, states: Sequence[ArrayLike], prior: ArrayLike | None = None,
                    alphabet: Sequence[str] | None = None) -> "CQChannel":
        """Build a channel; the prior defaults to uniform and labels to ``"0", "1", ...``."""
        n = len(states)
        if prior is None:
            prior = np.full(n, 1.0 / n)
        if alphabet is None:
            alphabet = [str(i) for i in range(n)]
        return cls(tuple(alphabet), np.asarray(prior, dtype=float), tuple(states))

    @property
    def dim(self) -> int:
        return self.outputs[0].shape[0]

    def __len__(self) -> int:
        return len(self.alphabet)

    def output(self, symbol: str) -> np.ndarray:
        return self.outputs[self.alphabet.index(symbol)]

    def with_prior(self, prior: ArrayLike) -> "CQChannel":
        return CQChannel(self.alphabet, np.asarray(prior, dtype=float), self.outputs)

    def supported(self) -> "CQChannel":
        """The channel restricted to symbols of positive prior mass."""
        keep = [i for i, p in enumerate(self.prior) if p > 0]
        if len(keep) == len(self.alphabet):
            return self
        return CQChannel(tuple(self.alphabet[i] for i in keep),
                         self.prior[keep] / self.prior[keep].sum(),
                         tuple(self.outputs[i] for i in keep))


@dataclass(frozen=True)
class CQState:
    """Block-diagonal classical-quantum state ``sum_x p(x)|x><x| (x) rho_B^x``.

    ``blocks[x]`` holds the weighted operator ``p(x) rho_B^x``.  The basis of
    the classical register is irrelevant because only blocks are stored.
    """

    labels: tuple[str, ...]
    prior: np.ndarray
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        prior = _readonly(np.array(self.prior, dtype=float))
        blocks = tuple(_readonly(as_hermitian(b, f"blocks[{i}]")) for i, b in enumerate(self.blocks))
        if len(prior) != len(blocks) or len(self.labels) != len(blocks):
            raise ValidationError("labels, prior and blocks differ in length")
        total = sum(float(np.trace(b).real) for b in blocks)
        if abs(total - 1.0) > TRACE_TOL:
            raise ValidationError("blocks do not have unit total trace", path="blocks",
                                  deviation=abs(total - 1.0))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return self.blocks[0].shape[0]

    def __len__(self) -> int:
        return len(self.blocks)

    @cached_property
    def marginal_b(self) -> np.ndarray:
        return _readonly(sum(self.blocks))

    def conditional(self, i: int) -> np.ndarray:
        return self.blocks[i] / self.prior[i]

    def joint_matrix(self) -> np.ndarray:
        """Full ``rho_XB`` as a block-diagonal matrix (X-major)."""
        return direct_sum(*self.blocks)

    def product_matrix(self) -> np.ndarray:
        """Full ``rho_X (x) rho_B``."""
        return tensor_product(np.diag(self.prior), self.marginal_b)


def build_cq_joint(ch: CQChannel) -> CQState:
    """Joint state ``rho_XB`` of a channel under its prior, dropping zero-mass symbols."""
    ch = ch.supported()
    return CQState(ch.alphabet, ch.prior, tuple(p * o for p, o in zip(ch.prior, ch.outputs)))


def cq_source(ch: CQChannel) -> CQState:
    """Joint state of a source with quantum side information; requires full support.

    Raises:
        ValidationError: if some symbol has zero prior mass.
    """
    zero = [i for i, p in enumerate(ch.prior) if p <= 0]
    if zero:
        raise ValidationError("source prior must have full support", path=f"prior[{zero[0]}]")
    return CQState(ch.alphabet, ch.prior, tuple(p * o for p, o in zip(ch.prior, ch.outputs)))


@dataclass(frozen=True)
class KrausChannel:
    """Quantum channel given by Kraus operators of shape ``(out_dim, in_dim)``."""

    in_dim: int
    out_dim: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = []
        for i, k in enumerate(self.kraus):
            k = np.array(k, dtype=complex)
            if k.shape != (self.out_dim, self.in_dim):
                raise ValidationError(f"Kraus operator has shape {k.shape}, expected "
                                      f"{(self.out_dim, self.in_dim)}", path=f"kraus[{i}]")
            ks.append(_readonly(k))
        if not ks:
            raise ValidationError("at least one Kraus operator is required", path="kraus")
        gram = sum(k.conj().T @ k for k in ks)
        dev = float(np.abs(gram - np.eye(self.in_dim)).max())
        if dev > COMPLETENESS_TOL:
            raise CompletenessViolation("Kraus operators are not trace preserving",
                                        path="kraus", deviation=dev)
        object.__setattr__(self, "kraus", tuple(ks))

    @classmethod
    def identity(cls, d: int) -> "KrausChannel":
        return cls(d, d, (np.eye(d),))

    def __call__(self, rho: ArrayLike) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = sum(k @ rho @ k.conj().T for k in self.kraus)
        return 0.5 * (out + out.conj().T)


def apply_kraus(ch: KrausChannel, rho: ArrayLike, shape: ShapeLike, acting_factor: int) -> np.ndarray:
    """Apply ``ch`` to one tensor factor of ``rho``.

    Args:
        ch: the channel.
        rho: operator on the composite space described by ``shape``.
        shape: factor dimensions of ``rho``.
        acting_factor: index of the factor the channel acts on.

    Returns:
        The output operator; factor ``acting_factor`` now has dimension
        ``ch.out_dim``.

    Raises:
        ShapeMismatch: if the factor dimension differs from ``ch.in_dim``.
    """
    shape = _as_shape(shape)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (shape.dim, shape.dim):
        raise ShapeMismatch(f"shape {shape.factor_dims} does not match operator of shape {rho.shape}")
    if not 0 <= acting_factor < len(shape):
        raise ShapeMismatch(f"factor {acting_factor} out of range")
    if shape.factor_dims[acting_factor] != ch.in_dim:
        raise ShapeMismatch(f"factor {acting_factor} has dimension "
                            f"{shape.factor_dims[acting_factor]}, channel expects {ch.in_dim}")
    left = int(np.prod(shape.factor_dims[:acting_factor]))
    right = int(np.prod(shape.factor_dims[acting_factor + 1:]))
    il, ir = np.eye(left), np.eye(right)
    out = 0
    for k in ch.kraus:
        kf = np.kron(np.kron(il, k), ir)
        out = out + kf @ rho @ kf.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class Precoder:
    """Deterministic map ``(u, v) -> x`` with independent priors on ``u`` and ``v``.

    For broadcast coding ``v`` is the second auxiliary variable; for coding
    with state information it is the channel state ``s``.
    """

    u_labels: tuple[str, ...]
    u_prior: np.ndarray
    v_labels: tuple[str, ...]
    v_prior: np.ndarray
    mapping: Mapping[tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "u_labels", tuple(str(u) for u in self.u_labels))
        object.__setattr__(self, "v_labels", tuple(str(v) for v in self.v_labels))
        object.__setattr__(self, "u_prior", _readonly(_validated_prior(self.u_prior, "u_prior")))
        object.__setattr__(self, "v_prior", _readonly(_validated_prior(self.v_prior, "v_prior")))
        if len(self.u_prior) != len(self.u_labels) or len(self.v_prior) != len(self.v_labels):
            raise ValidationError("precoder labels and priors differ in length")
        mapping = {(str(u), str(v)): str(x) for (u, v), x in dict(self.mapping).items()}
        missing = [(u, v) for u in self.u_labels for v in self.v_labels if (u, v) not in mapping]
        if missing:
            raise PartialPrecoder("precoder is not defined on every (u, v) pair",
                                  path=f"map[{join_label(missing[0])}]")
        object.__setattr__(self, "mapping", mapping)

    def __call__(self, u: str, v: str) -> str:
        return self.mapping[(u, v)]


Model = Union[CQChannel, DensityOperator, KrausChannel, Precoder]


# ---------------------------------------------------------------- file format

def _parse_matrix(obj, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{path}: expected a nonempty list of rows")
    n = len(obj[0])
    if any(len(r) != n for r in obj):
        raise ParseError(f"{path}: ragged rows")
    out = np.empty((len(obj), n), dtype=complex)
    for i, row in enumerate(obj):
        for j, v in enumerate(row):
            if isinstance(v, bool):
                raise ParseError(f"{path}[{i}][{j}]: expected a number or [re, im] pair")
            if isinstance(v, (int, float)):
                out[i, j] = v
            elif (isinstance(v, list) and len(v) == 2
                  and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
                out[i, j] = complex(v[0], v[1])
            else:
                raise ParseError(f"{path}[{i}][{j}]: expected a number or [re, im] pair")
    return out


def _matrix_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ParseError(f"{path}: missing key {key!r}")
    return obj[key]


def _symbol(s, path: str) -> str:
    if isinstance(s, str):
        return s
    if isinstance(s, (int, float)) and not isinstance(s, bool):
        return str(s)
    if isinstance(s, list) and s:
        return join_label(_symbol(p, path) for p in s)
    raise ParseError(f"{path}: symbol must be a string, number or list")


def _parse_prior_map(obj, path: str) -> tuple[tuple[str, ...], np.ndarray]:
    if not isinstance(obj, dict) or not obj:
        raise ParseError(f"{path}: expected a nonempty map from labels to probabilities")
    labels = tuple(obj)
    try:
        p = np.array([float(obj[k]) for k in labels])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: probabilities must be numbers") from exc
    return labels, p


def parse_model(text: str) -> Model:
    """Parse and validate a model file.

    Raises:
        ParseError: malformed JSON or structure.
        ValidationError: a numeric invariant fails; the message names the
            entry path and the measured deviation.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    kind = _require(obj, "kind", "$")
    if kind == "density":
        m = _parse_matrix(_require(obj, "matrix", "$"), "matrix")
        _validated_density(m, "matrix")
        return DensityOperator(m)
    if kind == "cq-channel":
        d = _require(obj, "dimB", "$")
        inputs = _require(obj, "inputs", "$")
        if not isinstance(inputs, list) or not inputs:
            raise ParseError("inputs: expected a nonempty list")
        symbols, prior, states = [], [], []
        for i, entry in enumerate(inputs):
            path = f"inputs[{i}]"
            if not isinstance(entry, dict):
                raise ParseError(f"{path}: expected an object")
            symbols.append(_symbol(_require(entry, "symbol", path), f"{path}.symbol"))
            p = _require(entry, "prior", path)
            if not isinstance(p, (int, float)) or isinstance(p, bool):
                raise ParseError(f"{path}.prior: expected a number")
            prior.append(float(p))
            m = _parse_matrix(_require(entry, "state", path), f"{path}.state")
            if m.shape != (d, d):
                raise ValidationError(f"state has shape {m.shape}, expected ({d}, {d})",
                                      path=f"{path}.state")
            _validated_density(m, f"{path}.state")
            states.append(m)
        _validated_prior(prior, "inputs[*].prior")
        return CQChannel(tuple(symbols), np.array(prior), tuple(states))
    if kind == "kraus-channel":
        a = int(_require(obj, "in_dim", "$"))
        b = int(_require(obj, "out_dim", "$"))
        raw = _require(obj, "kraus", "$")
        if not isinstance(raw, list) or not raw:
            raise ParseError("kraus: expected a nonempty list of matrices")
        return KrausChannel(a, b, tuple(_parse_matrix(k, f"kraus[{i}]") for i, k in enumerate(raw)))
    if kind == "precoder":
        u_labels, u_prior = _parse_prior_map(_require(obj, "u_prior", "$"), "u_prior")
        second = "v_prior" if "v_prior" in obj else "s_prior"
        v_labels, v_prior = _parse_prior_map(_require(obj, second, "$"), second)
        raw = _require(obj, "map", "$")
        if not isinstance(raw, dict):
            raise ParseError("map: expected an object keyed by 'u|v'")
        mapping = {}
        for key, x in raw.items():
            parts = split_label(key)
            if len(parts) != 2:
                raise ParseError(f"map[{key}]: key must have the form 'u|v'")
            mapping[parts] = _symbol(x, f"map[{key}]")
        return Precoder(u_labels, u_prior, v_labels, v_prior, mapping)
    raise ParseError(f"unknown model kind {kind!r}")


def serialize_model(model: Model) -> str:
    """Serialize a model to its canonical JSON text."""
    if isinstance(model, DensityOperator):
        obj = {"kind": "density", "matrix": _matrix_json(model.matrix)}
    elif isinstance(model, CQChannel):
        obj = {"kind": "cq-channel", "dimB": model.dim,
               "inputs": [{"symbol": s, "prior": float(p), "state": _matrix_json(o)}
                          for s, p, o in zip(model.alphabet, model.prior, model.outputs)]}
    elif isinstance(model, KrausChannel):
        obj = {"kind": "kraus-channel", "in_dim": model.in_dim, "out_dim": model.out_dim,
               "kraus": [_matrix_json(k) for k in model.kraus]}
    elif isinstance(model, Precoder):
        obj = {"kind": "precoder",
               "u_prior": dict(zip(model.u_labels, map(float, model.u_prior))),
               "v_prior": dict(zip(model.v_labels, map(float, model.v_prior))),
               "map": {join_label(k): x for k, x in model.mapping.items()}}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return json.dumps(obj, indent=1)
