"""Project configuration: an INI-style file plus command-line overrides.

Groups are defined inline so one config file fully reproduces an analysis:

    [corpus]
    paths = charters.vrt
    era = 300 1600

    [groups]
    storage = horreum granarium granica grangia
    grain = frumentum bladum avena civata

    [bins]
    target_mass = 1000000
    policy = midpoint
    max_span = 100

    [window]
    radius = 5

    [dsm]
    window = 5
    min_freq = 10
    weighting = ppmi
    k = 30
    edge_threshold = 0.5

    [output]
    dir = out
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field

from .chrono import DEFAULT_MAX_SPAN, DEFAULT_TARGET_MASS
from .corpus import ERA_DEFAULT, CorpusError, LemmaGroup
from .dsm import DsmConfig


class ConfigError(CorpusError):
    pass


@dataclass
class ProjectConfig:
    corpus_paths: tuple[str, ...] = ()
    groups: dict[str, LemmaGroup] = field(default_factory=dict)
    era: tuple[int, int] = ERA_DEFAULT
    strict: bool = True
    target_mass: int = DEFAULT_TARGET_MASS
    policy: str = "midpoint"
    max_span: int = DEFAULT_MAX_SPAN
    window: int = 5
    dsm: DsmConfig = field(default_factory=DsmConfig)
    out_dir: str = "out"

    def group(self, name: str) -> LemmaGroup:
        """Named group, falling back to a singleton group for a bare lemma."""
        if name in self.groups:
            return self.groups[name]
        return LemmaGroup.of(name, name)


def read_config(path: str) -> ProjectConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    cfg = ProjectConfig()

    if parser.has_section("corpus"):
        sec = parser["corpus"]
        if "paths" in sec:
            cfg.corpus_paths = tuple(sec["paths"].split())
        if "era" in sec:
            parts = sec["era"].split()
            if len(parts) != 2:
                raise ConfigError("era needs two years")
            cfg.era = (int(parts[0]), int(parts[1]))
        if "strict" in sec:
            cfg.strict = sec.getboolean("strict")

    if parser.has_section("groups"):
        for name, members in parser["groups"].items():
            lemmas = members.split()
            if not lemmas:
                raise ConfigError(f"group {name!r} has no members")
            cfg.groups[name] = LemmaGroup.of(name, *lemmas)

    if parser.has_section("bins"):
        sec = parser["bins"]
        cfg.target_mass = sec.getint("target_mass", cfg.target_mass)
        cfg.policy = sec.get("policy", cfg.policy)
        cfg.max_span = sec.getint("max_span", cfg.max_span)

    if parser.has_section("window"):
        cfg.window = parser["window"].getint("radius", cfg.window)

    if parser.has_section("dsm"):
        sec = parser["dsm"]
        cfg.dsm = DsmConfig(
            window=sec.getint("window", cfg.dsm.window),
            min_freq=sec.getint("min_freq", cfg.dsm.min_freq),
            weighting=sec.get("weighting", cfg.dsm.weighting),
            k=sec.getint("k", cfg.dsm.k),
            edge_threshold=sec.getfloat("edge_threshold", cfg.dsm.edge_threshold),
        )

    if parser.has_section("output"):
        cfg.out_dir = parser["output"].get("dir", cfg.out_dir)

    return cfg


def run_fingerprint(corpus_fingerprint: str, command: str, params: dict) -> str:
    """8-hex-digit fingerprint over corpus content + effective parameters.

    Embedded in output names so stale files are detectable.
    """
    payload = json.dumps(
        {"corpus": corpus_fingerprint, "command": command, "params": params},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:8]
