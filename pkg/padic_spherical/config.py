"""
Run Configuration Module
Konfiguration für Feld, Präzision, Seeds und Simulation
"""

import os
import json
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional

from dotenv import load_dotenv

from .errors import DomainError, PreconditionError
from .padic import validate_prime


@dataclass
class SimulationConfig:
    """Sprungprozess-Konfiguration."""
    alpha: float = 1.0
    k_min: int = -3
    k_max: int = 3
    paths: int = 100000
    T: float = 1.0
    total_rate: float = 1.0

    @property
    def shells(self) -> str:
        return f"{self.k_min}..{self.k_max}"

    def validate(self):
        if self.k_min > self.k_max:
            raise PreconditionError(f"empty shell range {self.shells}")
        if self.alpha <= 0 or self.total_rate <= 0 or self.T <= 0:
            raise PreconditionError("alpha, total rate and T must be positive")
        if self.paths < 1:
            raise PreconditionError("at least one path is required")


@dataclass
class RunConfig:
    """Haupt-Konfiguration für einen Lauf."""

    # Feld
    p: int = 3
    n: int = 2
    precision: int = 8
    modulus: Optional[List[int]] = None  # monic, low -> high

    # Reproduzierbarkeit
    seed: int = 1
    threads: int = 4

    # Ausgabe
    output: Optional[str] = None
    format: str = 'text'  # text, json

    # Sub-Konfiguration
    simulation: SimulationConfig = field(default_factory=SimulationConfig)

    def validate(self, spherical: bool = True):
        """
        Prüft die Grundannahmen.

        Raises:
            DomainError: p not an odd prime, or p | n for spherical subcommands
            PreconditionError: N < 1, threads < 1, unknown output format
        """
        validate_prime(self.p)
        if self.n < 1:
            raise DomainError(f"degree n = {self.n} must be positive")
        if spherical and self.n % self.p == 0:
            raise DomainError(f"p = {self.p} divides n = {self.n}; spherical coordinates need p ∤ n")
        if self.precision < 1:
            raise PreconditionError(f"precision N = {self.precision} must be at least 1")
        if self.threads < 1:
            raise PreconditionError("threads must be at least 1")
        if self.format not in ('text', 'json'):
            raise PreconditionError(f"unknown format {self.format!r}")
        self.simulation.validate()

    def to_dict(self) -> Dict:
        """Konvertiert zu Dictionary."""
        return asdict(self)

    def save(self, filepath: str):
        """Speichert Konfiguration als JSON."""
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False, sort_keys=True)

    @classmethod
    def load(cls, filepath: str) -> 'RunConfig':
        """Lädt Konfiguration aus JSON."""
        with open(filepath, 'r', encoding='utf-8') as f:
            data = json.load(f)

        simulation = SimulationConfig(**data.pop('simulation', {}))
        return cls(simulation=simulation, **data)

    @classmethod
    def from_env(cls) -> 'RunConfig':
        """Erstellt Konfiguration aus Umgebungsvariablen (und .env)."""
        load_dotenv()
        modulus = os.getenv('PADIC_MODULUS', '')
        return cls(
            p=int(os.getenv('PADIC_P', '3')),
            n=int(os.getenv('PADIC_N', '2')),
            precision=int(os.getenv('PADIC_PRECISION', '8')),
            modulus=[int(c) for c in modulus.split(',')] if modulus else None,
            seed=int(os.getenv('PADIC_SEED', '1')),
            threads=int(os.getenv('PADIC_THREADS', '4')),
            format=os.getenv('PADIC_FORMAT', 'text'),
        )


def parse_shells(text: str) -> tuple:
    """'-3..3' -> (-3, 3)."""
    try:
        low, high = text.split('..')
        return int(low), int(high)
    except ValueError:
        raise PreconditionError(f"shell range must look like -3..3, got {text!r}")
