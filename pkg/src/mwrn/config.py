"""Experiment configuration."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

PROTOCOLS = ("df", "af")
CHANNELS = ("awgn", "rayleigh")
ENGINES = ("dense", "rare")


class ConfigError(ValueError):
    """Invalid configuration value; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo campaign.

    ``snr_grid_db`` holds SNR per bit per user in dB; ``inf`` runs the
    noiseless limit. ``engine="rare"`` draws only the noise samples that can
    flip a decision and is available for DF over AWGN.
    """

    users: int
    protocol: str
    snr_grid_db: tuple[float, ...]
    channel: str = "awgn"
    bits_per_frame: int = 10_000
    frames: int | None = None
    seed: int = 1
    observer: int = 1
    bc_reuse_mac_channel: bool = False
    engine: str = "dense"

    def __post_init__(self):
        object.__setattr__(self, "protocol", str(self.protocol).lower())
        object.__setattr__(self, "channel", str(self.channel).lower())
        object.__setattr__(self, "engine", str(self.engine).lower())
        object.__setattr__(self, "snr_grid_db", tuple(float(x) for x in self.snr_grid_db))
        if self.frames is None:
            object.__setattr__(self, "frames", 100 if self.channel == "awgn" else 200)
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.users, int) or self.users < 2:
            raise ConfigError("users", f"must be an integer >= 2, got {self.users!r}")
        if self.protocol not in PROTOCOLS:
            raise ConfigError("protocol", f"must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.channel not in CHANNELS:
            raise ConfigError("channel", f"must be one of {CHANNELS}, got {self.channel!r}")
        if self.engine not in ENGINES:
            raise ConfigError("engine", f"must be one of {ENGINES}, got {self.engine!r}")
        if self.engine == "rare" and (self.protocol, self.channel) != ("df", "awgn"):
            raise ConfigError("engine", "the rare engine supports only protocol df over awgn")
        if not isinstance(self.bits_per_frame, int) or self.bits_per_frame < 1:
            raise ConfigError("bits_per_frame", f"must be an integer >= 1, got {self.bits_per_frame!r}")
        if not isinstance(self.frames, int) or self.frames < 1:
            raise ConfigError("frames", f"must be an integer >= 1, got {self.frames!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.observer, int) or not 1 <= self.observer <= self.users:
            raise ConfigError("observer", f"must be in 1..{self.users}, got {self.observer!r}")
        grid = self.snr_grid_db
        if not grid:
            raise ConfigError("snr", "grid must be non-empty")
        if any(math.isnan(x) or x == -math.inf for x in grid):
            raise ConfigError("snr", "grid values must be finite dB values or inf")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("snr", "grid must be strictly increasing")

    @property
    def L(self) -> int:
        return self.users

    @property
    def T(self) -> int:
        return self.bits_per_frame

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snr_grid_db"] = list(self.snr_grid_db)
        return d
