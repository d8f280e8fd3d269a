"""Effective channels, secondary SINR/SE and primary interference.

The tilt (and, in 3D mode, azimuth) gains enter as amplitudes on the channel
rows: ``a = sqrt(A_d) h_s^H + sqrt(A_r) u^H diag(e^{j alpha}) G`` toward the
SU and ``b = sqrt(A_i) f_p^H + sqrt(A_r) v^H diag(e^{j alpha}) G`` toward
the PU.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .antenna import gain_3d_linear, vertical_gain_linear
from .channels import ChannelSet, PbsBeamformer
from .scenario import Scenario, ScenarioError


@dataclass(frozen=True)
class DesignState:
    w_s: np.ndarray          # (N_s,) complex, units watt^(1/2)
    phases: np.ndarray       # (N,) real radians; RIS coefficient e^{j phase}
    theta_tilt_deg: float
    phi_azimuth_deg: float | None = None

    def validate(self, scenario: Scenario):
        if self.w_s.shape != (scenario.n_s,):
            raise ValueError(f"w_s shape {self.w_s.shape} != ({scenario.n_s},)")
        if self.phases.shape != (scenario.n_ris,):
            raise ValueError(
                f"phases shape {self.phases.shape} != ({scenario.n_ris},)")
        power = float(np.vdot(self.w_s, self.w_s).real)
        if power > scenario.p_max_w + 1e-9:
            raise ValueError(f"||w_s||^2 = {power} exceeds budget "
                             f"{scenario.p_max_w}")
        if not (-180.0 <= self.theta_tilt_deg <= 0.0):
            raise ValueError(f"theta_tilt_deg {self.theta_tilt_deg} outside "
                             "[-180, 0]")

    @property
    def ris_coefficients(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def with_phases(self, phases: np.ndarray) -> "DesignState":
        return replace(self, phases=np.asarray(phases, dtype=float))

    def with_beamformer(self, w_s: np.ndarray) -> "DesignState":
        return replace(self, w_s=np.asarray(w_s, dtype=complex))


def pattern_gains(state: DesignState, scenario: Scenario,
                  geometry=None) -> tuple[float, float, float]:
    """(A_d, A_r, A_i) power gains for the current tilt (and azimuth)."""
    th_d, th_r, th_i = scenario.elevation_angles_deg(geometry)
    if state.phi_azimuth_deg is not None:
        for name in ("phi_d_deg", "phi_r_deg", "phi_i_deg"):
            if getattr(scenario, name) is None:
                raise ScenarioError(f"3D mode requires scenario.{name}")
        g = lambda th_x, ph_x: gain_3d_linear(
            state.theta_tilt_deg, state.phi_azimuth_deg, th_x, ph_x,
            scenario.pattern)
        return (g(th_d, scenario.phi_d_deg), g(th_r, scenario.phi_r_deg),
                g(th_i, scenario.phi_i_deg))
    g = lambda th_x: vertical_gain_linear(state.theta_tilt_deg, th_x,
                                          scenario.pattern)
    return g(th_d), g(th_r), g(th_i)


def _effective_row(direct: np.ndarray, cascade_rx: np.ndarray,
                   state: DesignState, channels: ChannelSet,
                   a_direct: float, a_ris: float) -> np.ndarray:
    row = np.sqrt(a_direct) * direct.conj()
    if channels.G.shape[0] > 0:
        phi = state.ris_coefficients
        row = row + np.sqrt(a_ris) * (cascade_rx.conj() * phi) @ channels.G
    return row


def effective_su_row(state: DesignState, channels: ChannelSet,
                     scenario: Scenario, geometry=None) -> np.ndarray:
    a_d, a_r, _ = pattern_gains(state, scenario, geometry)
    return _effective_row(channels.h_s, channels.u, state, channels, a_d, a_r)


def effective_pu_row(state: DesignState, channels: ChannelSet,
                     scenario: Scenario, geometry=None) -> np.ndarray:
    a_d, a_r, a_i = pattern_gains(state, scenario, geometry)
    return _effective_row(channels.f_p, channels.v, state, channels, a_i, a_r)


def sinr_su(state: DesignState, channels: ChannelSet, w_p: PbsBeamformer,
            scenario: Scenario, geometry=None) -> float:
    a = effective_su_row(state, channels, scenario, geometry)
    signal = abs(np.dot(a, state.w_s)) ** 2
    interference = abs(np.vdot(channels.f_s, w_p.w_p)) ** 2
    return float(signal / (scenario.noise_w + interference))


def se_su(sinr: float) -> float:
    return float(np.log2(1.0 + sinr))


def pu_interference(state: DesignState, channels: ChannelSet,
                    scenario: Scenario, geometry=None) -> float:
    b = effective_pu_row(state, channels, scenario, geometry)
    return float(abs(np.dot(b, state.w_s)) ** 2)


def pu_sinr(state: DesignState, channels: ChannelSet, w_p: PbsBeamformer,
            scenario: Scenario, geometry=None) -> float:
    """Primary user's own SINR; diagnostic only, never a constraint."""
    signal = abs(np.vdot(channels.h_p, w_p.w_p)) ** 2
    interference = pu_interference(state, channels, scenario, geometry)
    return float(signal / (scenario.noise_w + interference))
