"""Geometric phase picked up by the control during a conditional rotation.

A conditional rotation drives the target only in the branch where the
control sits in the addressed state, so a superposed control acquires a
relative phase equal to the total phase of the driven target branch,
arg<psi(0)|psi(T)>. Subtracting the dynamical part -2*pi*<H>*T leaves the
geometric phase, which equals minus half the signed solid angle enclosed
by the target's Bloch trajectory once the open end is closed with the
shorter geodesic arc. `geometric_phase_analysis` computes both sides
independently: the phase from the simulated state evolution, the solid
angle from the simulated Bloch path alone.

The drive frame is the target's rotating frame at the microwave frequency;
the static frame Hamiltonian for drive axis x and detuning d (MHz) is
H = (d*sz + rabi*sx)/2, and the pulse duration keeps the resonant
calibration T = rotation/(2*pi*rabi), so a detuned drive traces a tilted,
slightly overshooting circle.

Solid-angle orientation follows the right-hand rule along the traversal;
the sign is pinned by the resonant 2*pi rotation, where both the branch
phase and minus half the great-circle solid angle come out at pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ENDPOINT_OVERLAP_TOL = 1e-6


@dataclass(frozen=True)
class GeometricPhaseResult:
    control_phase: float
    half_solid_angle: float
    total_phase: float
    dynamical_phase: float
    solid_angle: float
    trajectory: np.ndarray


def wrap_phase(x: float) -> float:
    """Wrap to (-pi, pi], keeping +pi fixed."""
    return math.pi - (math.pi - x) % (2.0 * math.pi)


def _bloch_vectors(psi: np.ndarray) -> np.ndarray:
    """(N, 2) state amplitudes in the (up, down) basis -> (N, 3) vectors."""
    rho01 = psi[:, 0] * np.conj(psi[:, 1])
    x = 2.0 * rho01.real
    y = -2.0 * rho01.imag
    z = np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2
    return np.stack([x, y, z], axis=1)


def _fan_apex(points: np.ndarray) -> np.ndarray:
    """Apex for the triangle fan: far from every path point and antipode."""
    candidates = [np.eye(3)[i] * s for i in range(3) for s in (1.0, -1.0)]
    mean = points.mean(axis=0)
    if np.linalg.norm(mean) > 0.1:
        candidates.append(mean / np.linalg.norm(mean))
    scores = [1.0 - np.abs(points @ c).max() for c in candidates]
    return candidates[int(np.argmax(scores))]


def _triangle_solid_angles(apex: np.ndarray, points: np.ndarray) -> np.ndarray:
    r2 = points[:-1]
    r3 = points[1:]
    triple = np.einsum("i,ji->j", apex, np.cross(r2, r3))
    denom = 1.0 + r2 @ apex + np.einsum("ij,ij->i", r2, r3) + r3 @ apex
    return 2.0 * np.arctan2(triple, denom)


def _geodesic_arc(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Minor great-circle arc from a to b, endpoints included."""
    cosang = float(np.clip(a @ b, -1.0, 1.0))
    ang = math.acos(cosang)
    if ang < 1e-12:
        return np.stack([a, b])
    s = np.linspace(0.0, 1.0, n)
    arc = (
        np.sin((1.0 - s) * ang)[:, None] * a + np.sin(s * ang)[:, None] * b
    ) / math.sin(ang)
    return arc


def signed_solid_angle(points: np.ndarray, closure_samples: int = 256) -> float:
    """Signed solid angle enclosed by a Bloch-sphere path.

    The path is closed with the shorter geodesic between its endpoints.
    The result is only defined modulo 4*pi (the fan apex picks the
    representative); callers comparing phases should reduce modulo 2*pi.
    """
    pts = np.asarray(points, dtype=float)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    end_gap = float(np.clip(pts[-1] @ pts[0], -1.0, 1.0))
    if end_gap < -1.0 + 1e-9:
        raise ValueError(
            "trajectory endpoints are antipodal; the geodesic closure is undefined"
        )
    closed = pts
    if end_gap < 1.0 - 1e-14:
        arc = _geodesic_arc(pts[-1], pts[0], closure_samples)
        closed = np.vstack([pts, arc[1:]])
    apex = _fan_apex(closed)
    return float(_triangle_solid_angles(apex, closed).sum())


def geometric_phase_analysis(
    detuning: float,
    rabi: float,
    rotation: float,
    samples: int = 4096,
) -> GeometricPhaseResult:
    """Compare the simulated branch phase against the solid-angle rule.

    detuning and rabi in MHz, rotation in radians (the resonant rotation
    angle the pulse is calibrated to). Requires |detuning| < 2*rabi.
    """
    if rabi <= 0:
        raise ValueError("rabi must be positive")
    if abs(detuning) >= 2.0 * rabi:
        raise ValueError("requires |detuning| < 2*rabi")
    if rotation < 0:
        raise ValueError("rotation must be non-negative")

    duration = rotation / (2.0 * math.pi * rabi)
    h = 0.5 * np.array([[detuning, rabi], [rabi, -detuning]], dtype=complex)
    energies, vecs = np.linalg.eigh(h)
    psi0 = np.array([0.0, 1.0], dtype=complex)
    times = np.linspace(0.0, duration, samples + 1)
    coeff = vecs.conj().T @ psi0
    phases = np.exp(-2j * np.pi * np.outer(times, energies))
    psi_t = (phases * coeff) @ vecs.T

    overlap = complex(np.vdot(psi0, psi_t[-1]))
    if abs(overlap) < _ENDPOINT_OVERLAP_TOL:
        raise ValueError(
            "final state is orthogonal to the start; the branch phase is undefined"
        )
    total = math.atan2(overlap.imag, overlap.real)
    h_expect = float(np.real(np.vdot(psi0, h @ psi0)))
    dynamical = -2.0 * math.pi * h_expect * duration
    control = wrap_phase(total - dynamical)

    trajectory = _bloch_vectors(psi_t)
    omega = signed_solid_angle(trajectory) if rotation > 0 else 0.0
    half = wrap_phase(-0.5 * omega)

    return GeometricPhaseResult(
        control_phase=control,
        half_solid_angle=half,
        total_phase=wrap_phase(total),
        dynamical_phase=dynamical,
        solid_angle=omega,
        trajectory=trajectory,
    )
