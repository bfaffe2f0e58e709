"""Final annealing states: Trotterized circuit evolution and RK4 integration.

Both engines work on a batch of parameter rows at once. Row ``r`` of
``c_rows`` replaces the schedule's CD coefficients and, if given,
``b_values[r]`` replaces its x-field prefactor; the problem Hamiltonian is
shared. Batching only vectorizes; each row evolves independently.
"""
from __future__ import annotations

from typing import Optional

import numba
import numpy as np

from .ising import IsingInstance
from .schedule import STEP_TOL, AnnealSchedule, build_trotter_circuit
from .statevector import StateVector, apply_gates, check_capacity

ENGINES = ("trotter", "ode")


def _rows(sched: AnnealSchedule, n: int, c_rows, b_values):
    if c_rows is None:
        c_rows = np.asarray(sched.c, dtype=float)[None, :]
    c_rows = np.atleast_2d(np.asarray(c_rows, dtype=float))
    if c_rows.shape[1] != n:
        raise ValueError(f"CD rows have {c_rows.shape[1]} entries, instance has {n} spins")
    k = c_rows.shape[0]
    if b_values is None:
        b_values = np.full(k, float(sched.b))
    b_values = np.broadcast_to(np.asarray(b_values, dtype=float), (k,))
    return c_rows, b_values


def _plus_batch(n: int, k: int) -> np.ndarray:
    dim = 1 << n
    return np.full((k, dim), dim ** -0.5, dtype=np.complex128)


def trotter_evolve_batch(
    instance: IsingInstance,
    sched: AnnealSchedule,
    c_rows=None,
    b_values=None,
) -> np.ndarray:
    """Fused-block Trotter evolution, returns amplitudes of shape (rows, 2^n).

    Per step the whole U_z block is one diagonal phase exp(-i A dt E(b)) and
    on each qubit RX then RY are merged into one 2x2 matrix. This is the same
    unitary as the gate list of ``build_trotter_circuit``.
    """
    n = instance.n
    check_capacity(n)
    c_rows, b_values = _rows(sched, n, c_rows, b_values)
    k = c_rows.shape[0]
    energies = instance.diagonal()
    psi = _plus_batch(n, k)
    dt = sched.dt
    for t in sched.step_times():
        frac = t / sched.T
        A = sched.a * frac
        env = np.sin(np.pi * frac) ** 2
        if A != 0.0:
            psi *= np.exp(-1j * A * dt * energies)[None, :]
        # half angles: RX(-2 B dt) -> -B dt, RY(-2 C dt) -> -C dt
        bx = -b_values * (1.0 - frac) * dt
        cx_, sx_ = np.cos(bx), np.sin(bx)
        for q in range(n):
            hy = -env * c_rows[:, q] * dt
            cy, sy = np.cos(hy), np.sin(hy)
            # RY(2 hy) @ RX(2 bx)
            m00 = cy * cx_ + 1j * sy * sx_
            m01 = -1j * cy * sx_ - sy * cx_
            m10 = sy * cx_ - 1j * cy * sx_
            m11 = -1j * sy * sx_ + cy * cx_
            view = psi.reshape(k, 1 << (n - 1 - q), 2, 1 << q)
            a0 = view[:, :, 0, :].copy()
            a1 = view[:, :, 1, :]
            view[:, :, 0, :] = m00[:, None, None] * a0 + m01[:, None, None] * a1
            view[:, :, 1, :] = m10[:, None, None] * a0 + m11[:, None, None] * a1
    return psi


def trotter_evolve(instance: IsingInstance, sched: AnnealSchedule, method: str = "fused") -> StateVector:
    """psi(T) from |+...+> through the Trotterized annealing circuit.

    ``method="gates"`` applies the explicit gate list one gate at a time; the
    default fused path is the identical unitary and much faster.
    """
    if sched.n != instance.n:
        raise ValueError(f"schedule has {sched.n} CD coefficients, instance has {instance.n} spins")
    if method == "gates":
        circuit = build_trotter_circuit(instance, sched)
        state = StateVector(instance.n, np.zeros(1 << instance.n, dtype=np.complex128))
        state.amplitudes[0] = 1.0
        return apply_gates(state, circuit.gates)
    if method != "fused":
        raise ValueError(f"unknown method {method!r}")
    return StateVector(instance.n, trotter_evolve_batch(instance, sched)[0])


@numba.njit(cache=True)
def _hamiltonian_row(psi, out, energies, A, B, c_t, n):
    """out = -i H(t) psi for one row; B = B(t), c_t[q] = C_q(t)."""
    dim = psi.shape[0]
    for idx in range(dim):
        out[idx] = A * energies[idx] * psi[idx]
    for q in range(n):
        up = complex(-B, c_t[q])
        down = complex(-B, -c_t[q])
        stride = 1 << q
        for base in range(0, dim, 2 * stride):
            for i0 in range(base, base + stride):
                i1 = i0 + stride
                out[i0] += up * psi[i1]
                out[i1] += down * psi[i0]
    for idx in range(dim):
        v = out[idx]
        out[idx] = complex(v.imag, -v.real)


@numba.njit(cache=True)
def _rhs(y, out, energies, a, b, c_row, t, T, n, c_t):
    frac = t / T
    env = np.sin(np.pi * frac) ** 2
    for q in range(n):
        c_t[q] = c_row[q] * env
    _hamiltonian_row(y, out, energies, a * frac, b * (1.0 - frac), c_t, n)


@numba.njit(cache=True)
def _rk4_rows(psi, energies, c_rows, b_values, a, T, steps, n):
    h = T / steps
    dim = psi.shape[1]
    k1 = np.empty(dim, dtype=np.complex128)
    k2 = np.empty(dim, dtype=np.complex128)
    k3 = np.empty(dim, dtype=np.complex128)
    k4 = np.empty(dim, dtype=np.complex128)
    tmp = np.empty(dim, dtype=np.complex128)
    c_t = np.empty(n)
    for r in range(psi.shape[0]):
        y = psi[r]
        b = b_values[r]
        c_row = c_rows[r]
        for s in range(steps):
            t = s * h
            _rhs(y, k1, energies, a, b, c_row, t, T, n, c_t)
            for i in range(dim):
                tmp[i] = y[i] + 0.5 * h * k1[i]
            _rhs(tmp, k2, energies, a, b, c_row, t + 0.5 * h, T, n, c_t)
            for i in range(dim):
                tmp[i] = y[i] + 0.5 * h * k2[i]
            _rhs(tmp, k3, energies, a, b, c_row, t + 0.5 * h, T, n, c_t)
            for i in range(dim):
                tmp[i] = y[i] + h * k3[i]
            _rhs(tmp, k4, energies, a, b, c_row, t + h, T, n, c_t)
            for i in range(dim):
                y[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])


def ode_evolve_batch(
    instance: IsingInstance,
    sched: AnnealSchedule,
    dt_int: float = 1e-3,
    c_rows=None,
    b_values=None,
    renormalize: bool = True,
):
    """Fixed-step RK4 for i dpsi/dt = H(t) psi from |+...+> over [0, T].

    Returns ``(amplitudes, norms_squared)`` where the norms are measured
    before the single final renormalization.
    """
    if not dt_int > 0 or dt_int > sched.dt + STEP_TOL:
        raise ValueError(f"integrator step must satisfy 0 < dt_int <= dt, got {dt_int}")
    steps = round(sched.T / dt_int)
    if steps < 1 or abs(steps * dt_int - sched.T) > STEP_TOL:
        raise ValueError(f"T={sched.T} is not an integer multiple of dt_int={dt_int}")
    n = instance.n
    check_capacity(n)
    c_rows, b_values = _rows(sched, n, c_rows, b_values)
    psi = _plus_batch(n, c_rows.shape[0])
    _rk4_rows(psi, instance.diagonal(), np.ascontiguousarray(c_rows),
              np.ascontiguousarray(b_values, dtype=float), float(sched.a), float(sched.T), steps, n)
    norms = np.einsum("ij,ij->i", psi.conj(), psi).real
    if renormalize:
        psi /= np.sqrt(norms)[:, None]
    return psi, norms


def ode_evolve(instance: IsingInstance, sched: AnnealSchedule, dt_int: float = 1e-3) -> StateVector:
    if sched.n != instance.n:
        raise ValueError(f"schedule has {sched.n} CD coefficients, instance has {instance.n} spins")
    amps, _ = ode_evolve_batch(instance, sched, dt_int)
    return StateVector(instance.n, amps[0])


def evolve_batch(
    engine: str,
    instance: IsingInstance,
    sched: AnnealSchedule,
    c_rows=None,
    b_values=None,
    dt_int: Optional[float] = None,
) -> np.ndarray:
    if engine == "trotter":
        return trotter_evolve_batch(instance, sched, c_rows, b_values)
    if engine == "ode":
        return ode_evolve_batch(instance, sched, 1e-3 if dt_int is None else dt_int, c_rows, b_values)[0]
    raise ValueError(f"unknown engine {engine!r}, expected one of {ENGINES}")
