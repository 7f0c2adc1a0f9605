"""Maximisation of Bell expressions over projective qubit measurements.

Every correlator is a contraction of the state's Pauli-basis tensor
``T[a, b, c] = Re Tr[rho (s_a x s_b x s_c)]`` (``s_0`` the identity) with one
"frame" per party.  A party's frame is the 3x4 matrix whose rows are
``(1, 0, 0, 0)`` for the unmeasured slot and ``(0, n_0)``, ``(0, n_1)`` for
its two Bloch vectors, so the correlation tensor of a scenario is
``einsum('abc,ia,jb,kc->ijk', T, FA, FB, FC)`` in the layout of
:mod:`ghz_nonlocality.bell`.

With all other observables fixed, the expression is affine in a single Bloch
vector, ``v . n + const``; the see-saw sets ``n = v / |v|`` for each observable
in turn, which can never decrease the value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bell import BellExpression, evaluate
from .linalg import PAULI_BASIS

DEFAULT_STARTS = 50
DEFAULT_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 500
ZERO_GRADIENT = 1e-14
SETTINGS = ("A0", "A1", "B0", "B1", "C0", "C1")

# axis orders that bring each party to the front, others kept in order
_PARTY_AXES = ((0, 1, 2), (1, 0, 2), (2, 0, 1))


@dataclass(frozen=True)
class ObservableDirection:
    theta: float
    phi: float

    def bloch(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    @classmethod
    def from_bloch(cls, n) -> "ObservableDirection":
        x, y, z = np.asarray(n, dtype=float) / np.linalg.norm(n)
        return cls(float(np.arccos(np.clip(z, -1.0, 1.0))), float(np.arctan2(y, x) % (2 * np.pi)))


@dataclass(frozen=True)
class MeasurementScenario:
    """Six observables A0, A1, B0, B1, C0, C1."""

    directions: tuple[ObservableDirection, ...]

    def __post_init__(self):
        if len(self.directions) != 6:
            raise ValueError("a scenario needs exactly six directions")

    @classmethod
    def from_bloch(cls, vectors) -> "MeasurementScenario":
        """From an array of shape (3, 2, 3): party, setting, xyz."""
        v = np.asarray(vectors, dtype=float).reshape(6, 3)
        return cls(tuple(ObservableDirection.from_bloch(n) for n in v))

    def bloch(self) -> np.ndarray:
        return np.array([d.bloch() for d in self.directions]).reshape(3, 2, 3)

    def as_dict(self) -> dict[str, dict[str, float]]:
        return {s: {"theta": d.theta, "phi": d.phi} for s, d in zip(SETTINGS, self.directions)}


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    scenario: MeasurementScenario
    starts_used: int
    converged: bool
    sweeps: int = 0


def observable(d: ObservableDirection) -> np.ndarray:
    n = d.bloch()
    return np.einsum("k,kij->ij", n, PAULI_BASIS[1:])


def pauli_tensor(rho: np.ndarray) -> np.ndarray:
    """Re Tr[rho (s_a x s_b x s_c)] for a, b, c in (I, X, Y, Z)."""
    r = np.asarray(rho, dtype=np.complex128).reshape(2, 2, 2, 2, 2, 2)
    # Tr[rho O] = sum rho[ijk, lmn] O[lmn, ijk]
    t = np.einsum("ijklmn,ali,bmj,cnk->abc", r, PAULI_BASIS, PAULI_BASIS, PAULI_BASIS, optimize=True)
    return np.ascontiguousarray(t.real)


def _frames(n: np.ndarray) -> np.ndarray:
    """(..., 3, 2, 3) Bloch vectors -> (..., 3, 3, 4) party frames."""
    shape = n.shape[:-3]
    f = np.zeros(shape + (3, 3, 4))
    f[..., :, 0, 0] = 1.0
    f[..., :, 1:, 1:] = n
    return f


def _contract_two(t: np.ndarray, f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    """x[..., m, j, k] = sum_nl t[..., m, n, l] f1[..., j, n] f2[..., k, l]."""
    y = t @ np.swapaxes(f2, -1, -2)[..., None, :, :]  # (..., m, n, k)
    return f1[..., None, :, :] @ y  # (..., m, j, k)


def _correlation_tensor(t: np.ndarray, frames: np.ndarray) -> np.ndarray:
    x = _contract_two(t, frames[..., 1, :, :], frames[..., 2, :, :])
    return np.einsum("...ia,...ajk->...ijk", frames[..., 0, :, :], x)


def correlations(rho: np.ndarray, scenario: MeasurementScenario) -> np.ndarray:
    """3x3x3 correlation tensor; entry [0,0,0] is Tr rho."""
    return _correlation_tensor(pauli_tensor(rho), _frames(scenario.bloch()))


def correlations_direct(rho: np.ndarray, scenario: MeasurementScenario) -> np.ndarray:
    """Same tensor by explicit 8x8 traces; slow reference path."""
    ops = [np.eye(2, dtype=np.complex128)] + [observable(d) for d in scenario.directions]
    party_ops = [[ops[0], ops[1 + 2 * k], ops[2 + 2 * k]] for k in range(3)]
    out = np.zeros((3, 3, 3))
    rho = np.asarray(rho, dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                big = np.kron(np.kron(party_ops[0][i], party_ops[1][j]), party_ops[2][k])
                out[i, j, k] = np.real(np.einsum("ij,ji->", rho, big))
    return out


def random_bloch(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Uniform unit vectors: cos(theta) ~ U[-1, 1], phi ~ U[0, 2pi)."""
    cos_t = rng.uniform(-1.0, 1.0, size=shape)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    sin_t = np.sqrt(1.0 - cos_t**2)
    return np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=-1)


def _ascend(t, coeffs, n, tol, max_sweeps):
    """Batched see-saw.

    ``t``: (B, 4, 4, 4) Pauli tensors, ``coeffs``: (3, 3, 3), ``n``: (B, 3, 2, 3)
    initial Bloch vectors (overwritten with the final ones).  Returns final
    values, the convergence mask and the sweep count of each batch element.
    """
    batch = t.shape[0]
    w_flat = [coeffs.transpose(axes)[1:].reshape(2, 9).T for axes in _PARTY_AXES]
    others = [(1, 2), (0, 2), (0, 1)]

    frames = _frames(n)
    value = np.einsum("ijk,bijk->b", coeffs, _correlation_tensor(t, frames))
    converged = np.zeros(batch, dtype=bool)
    sweeps = np.zeros(batch, dtype=int)

    # working set holds only still-active elements and shrinks as they finish
    idx = np.arange(batch)
    work_t = t
    work_tp = [np.ascontiguousarray(t.transpose((0,) + tuple(a + 1 for a in axes))) for axes in _PARTY_AXES]
    fr = frames.copy()
    val = value.copy()
    for sweep in range(1, max_sweeps + 1):
        start_val = val
        for party in range(3):
            o1, o2 = others[party]
            x = _contract_two(work_tp[party], fr[:, o1], fr[:, o2])  # (b, m, j, k)
            grad = np.swapaxes(x[:, 1:].reshape(-1, 3, 9) @ w_flat[party], 1, 2)  # (b, setting, xyz)
            norm = np.linalg.norm(grad, axis=-1, keepdims=True)
            keep = norm < ZERO_GRADIENT
            unit = grad / np.where(keep, 1.0, norm)
            fr[:, party, 1:, 1:] = np.where(keep, fr[:, party, 1:, 1:], unit)
        val = np.einsum("ijk,bijk->b", coeffs, _correlation_tensor(work_t, fr))
        if np.any(val < start_val - 1e-10 * (1.0 + np.abs(start_val))):
            raise AssertionError("see-saw sweep decreased the objective")
        done = val - start_val < tol
        if sweep == max_sweeps:
            finished = np.ones_like(done)
        else:
            finished = done
        if finished.any():
            fin = idx[finished]
            frames[fin], value[fin], sweeps[fin] = fr[finished], val[finished], sweep
            converged[fin] = done[finished]
            live = ~finished
            if not live.any():
                break
            idx, fr, val, work_t = idx[live], fr[live], val[live], work_t[live]
            work_tp = [w[live] for w in work_tp]

    n[...] = frames[..., 1:, 1:]
    return value, converged, sweeps


def seesaw_batch(
    rhos,
    expr: BellExpression,
    starts: int = DEFAULT_STARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    absolute: bool = False,
    chunk: int = 400,
) -> list[OptimizationResult]:
    """Run :func:`seesaw` on many states.

    Every state uses the same ``starts`` initial scenarios drawn from
    ``seed``, so a state's result does not depend on what else is in the
    batch.  States are processed ``chunk`` at a time to bound memory.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    init = random_bloch(rng, (starts, 3, 2))
    signs = (1.0, -1.0) if absolute else (1.0,)
    rhos = list(rhos)
    results = []
    for lo in range(0, len(rhos), chunk):
        tensors = np.stack([pauli_tensor(r) for r in rhos[lo : lo + chunk]])
        n_states = tensors.shape[0]
        t = np.repeat(tensors, starts, axis=0)
        per_sign = []
        for sign in signs:
            n = np.tile(init, (n_states, 1, 1, 1))
            v, c, sw = _ascend(t, sign * expr.coefficients, n, tol, max_sweeps)
            per_sign.append((v.reshape(n_states, starts), c.reshape(n_states, starts),
                             sw.reshape(n_states, starts), n.reshape(n_states, starts, 3, 2, 3)))
        for s in range(n_states):
            # ties go to the earlier sign, then the earlier start
            cand = [(vals[s].max(), -k, k) for k, (vals, *_rest) in enumerate(per_sign)]
            _, _, k = max(cand)
            vals, conv, sw, n = per_sign[k]
            best = int(np.argmax(vals[s]))
            results.append(
                OptimizationResult(
                    value=float(vals[s, best]),
                    scenario=MeasurementScenario.from_bloch(n[s, best]),
                    starts_used=starts,
                    converged=bool(conv[s, best]),
                    sweeps=int(sw[s, best]),
                )
            )
    return results


def seesaw(
    rho: np.ndarray,
    expr: BellExpression,
    starts: int = DEFAULT_STARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    absolute: bool = False,
) -> OptimizationResult:
    """Multi-start see-saw maximum of ``expr`` over projective measurements.

    By default the signed expression is maximised, which is the quantity a
    one-sided facet ``expr <= bound`` constrains.  ``absolute=True`` also
    maximises ``-expr`` and reports the larger, i.e. the maximum of ``|expr|``.
    """
    return seesaw_batch([rho], expr, starts, tol, seed, max_sweeps, absolute)[0]


def random_search_oracle(
    rho: np.ndarray,
    expr: BellExpression,
    samples: int,
    seed: int = 0,
    absolute: bool = False,
    chunk: int = 20000,
) -> float:
    """Best value over uniformly random scenarios; a lower bound on the maximum."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    t = pauli_tensor(rho)
    rng = np.random.default_rng(seed)
    best = -np.inf
    left = samples
    while left > 0:
        m = min(chunk, left)
        frames = _frames(random_bloch(rng, (m, 3, 2)))
        vals = np.einsum("ijk,bijk->b", expr.coefficients, _correlation_tensor(t, frames))
        if absolute:
            vals = np.abs(vals)
        best = max(best, float(vals.max()))
        left -= m
    return best


def result_value_check(rho: np.ndarray, expr: BellExpression, result: OptimizationResult, absolute: bool = False) -> float:
    """Recompute the value of a result's scenario directly."""
    v = evaluate(expr, correlations(rho, result.scenario))
    return abs(v) if absolute else v
