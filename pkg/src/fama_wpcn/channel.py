"""System configuration, block-correlation model and channel sampling.

Gains follow the block model: every port ``n`` in block ``b`` sees

    g = sqrt(1 - mu2) * (x_n + j y_n) + mu * (x_b + j y_b)

with independent standard normal components, so ``E|g|^2 = 2``. The
downlink gain set of a port holds the desired link (index 0) followed by
the ``M - 1`` interfering links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import specfun
from .errors import ConfigError


def db_to_linear(db):
    """Power ratio in dB to linear scale (``-inf`` maps to 0)."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def dbm_to_watt(dbm):
    return 10.0 ** ((float(dbm) - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Physical and protocol parameters of one user's link budget."""

    M: int = 4
    N: int = 50
    W: float = 3.0
    mu2: float = 0.97
    eta: float = 0.45
    rho: float = 0.5
    pt_dbm: float = 20.0
    noise_dbm: float = -90.0
    t1: float = 0.8
    d: float = 12.0
    zeta: float = 2.2
    pathloss_ref: float = 1e-3

    def __post_init__(self):
        checks = [
            (isinstance(self.M, (int, np.integer)) and self.M >= 1, "M must be an integer >= 1"),
            (isinstance(self.N, (int, np.integer)) and self.N >= 1, "N must be an integer >= 1"),
            (self.W > 0, "W must be > 0"),
            (0.0 < self.mu2 < 1.0, "mu2 must lie in (0, 1)"),
            (0.0 < self.eta <= 1.0, "eta must lie in (0, 1]"),
            (0.0 <= self.rho < 1.0, "rho must lie in [0, 1)"),
            (0.0 < self.t1 < 1.0, "t1 must lie in (0, 1)"),
            (self.d > 0, "d must be > 0"),
            (self.zeta > 0, "zeta must be > 0"),
            (self.pathloss_ref > 0, "pathloss_ref must be > 0"),
        ]
        for name in ("W", "mu2", "eta", "rho", "pt_dbm", "noise_dbm", "t1", "d",
                     "zeta", "pathloss_ref"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    @property
    def t2(self) -> float:
        return 1.0 - self.t1

    @property
    def pt(self) -> float:
        """Transmit power in watts."""
        return dbm_to_watt(self.pt_dbm)

    @property
    def noise(self) -> float:
        """Noise power in watts."""
        return dbm_to_watt(self.noise_dbm)

    @property
    def pathloss_gain(self) -> float:
        """Large-scale gain ``pathloss_ref * d^-zeta`` (< 1)."""
        return self.pathloss_ref * self.d ** (-self.zeta)

    @property
    def omega(self) -> float:
        """Large-scale loss factor, the reciprocal of :attr:`pathloss_gain`."""
        return self.d ** self.zeta / self.pathloss_ref

    @property
    def kappa2(self) -> float:
        """``mu2 / (1 - mu2)``, the common-to-private power ratio."""
        return self.mu2 / (1.0 - self.mu2)


@dataclass(frozen=True)
class DerivedParams:
    gamma_tilde: float
    gamma_hat: float


def derived_params(cfg: SystemConfig, gamma_ul) -> DerivedParams:
    """Normalized uplink thresholds for a linear SNR threshold ``gamma_ul``.

    Uplink outage is ``alpha * beta < gamma_tilde`` with alpha, beta the
    gains scaled by ``1 / (1 - mu2)``; ``gamma_hat`` is the same threshold
    for gains scaled by ``1/2``.
    """
    base = gamma_ul * cfg.t2 * cfg.noise * cfg.omega ** 2 / (
        cfg.eta * (1.0 - cfg.rho) * cfg.pt * cfg.t1)
    gamma_tilde = base / (1.0 - cfg.mu2) ** 2
    return DerivedParams(gamma_tilde=gamma_tilde, gamma_hat=base / 4.0)


# ---------------------------------------------------------------------------
# Port correlation and block structure
# ---------------------------------------------------------------------------

def jakes_matrix(N: int, W: float) -> np.ndarray:
    """Spatial correlation ``J0(2 pi (n1 - n2) W / (N - 1))`` of N ports."""
    if int(N) != N or N < 2:
        raise ConfigError(f"jakes_matrix needs N >= 2, got {N!r}")
    if not W > 0:
        raise ConfigError(f"jakes_matrix needs W > 0, got {W!r}")
    idx = np.arange(int(N))
    lag = idx[:, None] - idx[None, :]
    return specfun.bessel_j0(2.0 * np.pi * lag * W / (N - 1))


@dataclass(frozen=True)
class BlockStructure:
    """Independent constant-correlation blocks covering all ports."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or min(sizes) < 1:
            raise ConfigError(f"block sizes must be >= 1, got {self.sizes!r}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def B(self) -> int:
        return len(self.sizes)

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def port_block(self) -> np.ndarray:
        """Block index of every port."""
        return np.repeat(np.arange(self.B), self.sizes)

    def eigenvalues(self, mu2: float) -> np.ndarray:
        """Spectrum of the block model correlation matrix, descending."""
        big = [1.0 + (s - 1) * mu2 for s in self.sizes]
        small = [1.0 - mu2] * (self.N - self.B)
        return np.sort(np.array(big + small))[::-1]


def derive_blocks(N: int, W: float, mu2: float = 0.97, eps: float = 1.0) -> BlockStructure:
    """Fit the block model to the Jakes spectrum.

    Every eigenvalue ``lam >= eps`` becomes one block whose leading
    eigenvalue ``1 + (L - 1) mu2`` matches it, i.e.
    ``L = round((lam - (1 - mu2)) / mu2)`` with ``L >= 1``. The port
    count left over by rounding is absorbed by the largest blocks.
    """
    if int(N) != N or N < 2:
        raise ConfigError(f"derive_blocks needs N >= 2, got {N!r}")
    if not 0.0 < mu2 < 1.0:
        raise ConfigError(f"mu2 must lie in (0, 1), got {mu2!r}")
    N = int(N)
    if not 0.0 < eps < (N - 1) / W:
        raise ConfigError(
            f"eps must lie in (0, (N-1)/W) = (0, {(N - 1) / W:.6g}), got {eps!r}")
    lam = np.sort(np.linalg.eigvalsh(jakes_matrix(N, W)))[::-1]
    top = lam[lam >= eps]
    if top.size == 0:
        top = lam[:1]
    sizes = np.maximum(1, np.rint((top - (1.0 - mu2)) / mu2)).astype(int)
    if sizes.size > N:
        sizes = sizes[:N]
    residual = N - int(sizes.sum())
    i = 0
    while residual != 0:
        j = i % sizes.size
        if residual > 0:
            sizes[j] += 1
            residual -= 1
        elif sizes[j] > 1:
            sizes[j] -= 1
            residual += 1
        elif np.all(sizes == 1):
            # more blocks than ports cannot happen (B <= N); defensive
            break
        i += 1
    return BlockStructure(tuple(int(s) for s in sizes))


def single_block_sizes(K: int) -> BlockStructure:
    """K independent ports (one port per block)."""
    return BlockStructure((1,) * int(K))


# ---------------------------------------------------------------------------
# Channel realizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelDraw:
    """A batch of channel realizations.

    g: (trials, N, M) downlink gains, link 0 is the desired one.
    h: (trials, N) uplink gains.
    common_g: (trials, B, M) and common_h: (trials, B) block-level parts.
    """

    g: np.ndarray
    h: np.ndarray
    common_g: np.ndarray
    common_h: np.ndarray
    port_block: np.ndarray = field(repr=False)


def _complex_normals(rng, shape):
    z = rng.standard_normal(shape + (2,))
    return z[..., 0] + 1j * z[..., 1]


def sample_draw(cfg: SystemConfig, blocks: BlockStructure, rng, trials: int = 1) -> ChannelDraw:
    """Draw ``trials`` independent realizations from the block model."""
    M, N, B = cfg.M, blocks.N, blocks.B
    if N != cfg.N:
        raise ConfigError(f"blocks cover {N} ports but cfg.N = {cfg.N}")
    # one normal block per call keeps the stream layout fixed
    z = _complex_normals(rng, (int(trials), N + B, M + 1))
    private, common = z[:, :N], z[:, N:]
    pb = blocks.port_block
    a, c = math.sqrt(1.0 - cfg.mu2), math.sqrt(cfg.mu2)
    gains = a * private + c * common[:, pb]
    return ChannelDraw(g=gains[:, :, :M], h=gains[:, :, M],
                       common_g=common[:, :, :M], common_h=common[:, :, M],
                       port_block=pb)


def sample_draw_jakes(cfg: SystemConfig, rng, trials: int = 1, root=None) -> ChannelDraw:
    """Draw from the exact Jakes covariance (matrix square root colouring).

    Port gains have the same marginal ``E|g|^2 = 2`` as the block model.
    """
    M, N = cfg.M, cfg.N
    if root is None:
        root = jakes_root(N, cfg.W)
    z = _complex_normals(rng, (int(trials), N, M + 1))
    gains = np.einsum("ij,tjk->tik", root, z)
    empty = np.zeros((int(trials), 0, M + 1), dtype=complex)
    return ChannelDraw(g=gains[:, :, :M], h=gains[:, :, M],
                       common_g=empty[..., :M], common_h=empty[..., M],
                       port_block=np.zeros(N, dtype=int))


def jakes_root(N: int, W: float) -> np.ndarray:
    """Symmetric square root of the Jakes matrix (negative modes clipped)."""
    lam, vec = np.linalg.eigh(jakes_matrix(N, W))
    lam = np.clip(lam, 0.0, None)
    return (vec * np.sqrt(lam)) @ vec.T


@dataclass(frozen=True)
class MetricDraw:
    """Per-port link metrics, arrays of shape (trials, N)."""

    X: np.ndarray
    Y: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    sir: np.ndarray
    ehp: np.ndarray
    ul_snr: np.ndarray
    dl_outage: np.ndarray | None = None
    ul_outage: np.ndarray | None = None

    @property
    def uplink_gain(self) -> np.ndarray:
        return self.beta


def metrics(cfg: SystemConfig, draw: ChannelDraw, dl_threshold=None, ul_threshold=None) -> MetricDraw:
    """SIR, harvested power and uplink SNR of every port.

    Thresholds are linear; when given, per-port outage indicators are
    filled in as well.
    """
    scale = 1.0 - cfg.mu2
    power = np.abs(draw.g) ** 2
    desired = power[..., 0]
    interference = power[..., 1:].sum(axis=-1)
    total = desired + interference
    uplink = np.abs(draw.h) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = np.where(interference > 0, desired / interference, np.inf)
    ehp = cfg.eta * (1.0 - cfg.rho) * cfg.pt * cfg.t1 * total / cfg.omega
    ul_snr = uplink * ehp / (cfg.t2 * cfg.noise * cfg.omega)
    dl_out = None if dl_threshold is None else sir < dl_threshold
    ul_out = None if ul_threshold is None else ul_snr < ul_threshold
    return MetricDraw(X=desired / scale, Y=interference / scale,
                      alpha=total / scale, beta=uplink / scale, sir=sir,
                      ehp=ehp, ul_snr=ul_snr, dl_outage=dl_out, ul_outage=ul_out)
