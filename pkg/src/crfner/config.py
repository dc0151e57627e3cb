"""Run configuration: plain-text key=value files and language presets.

Lines are `key = value` with `#` comments; unknown keys are a hard error.
A `language` preset seeds the per-language defaults (capitalization only
for en; conventional gazetteer slot names) before explicit keys override
them.  Gazetteer files are declared as `gazetteer.<name> = <path>`, with
an optional `gazetteer.<name>.fold_case = true|false`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .features import DEFAULT_VERB_TAGS, FeatureConfig


class ConfigError(ValueError):
    pass


# language -> (use_capital, conventional gazetteer slots, fold gazetteer case)
PRESETS = {
    "en": (True, ("person", "location"), True),
    "bn": (False, ("person", "location"), False),
    "hi": (False, ("person",), False),
    "ta": (False, (), False),
    "te": (False, (), False),
}

_BOOL = {"true": True, "yes": True, "1": True,
         "false": False, "no": False, "0": False}

_FEATURE_KEYS = {
    "context_window": int,
    "affix_min": int,
    "affix_max": int,
    "affix_nnp_only": bool,
    "use_pos": bool,
    "use_chunk": bool,
    "use_boundary": bool,
    "use_digit": bool,
    "use_position": bool,
    "use_verb": bool,
    "use_capital": bool,
    "gaz_match": str,
}

_HYPER_KEYS = {
    "l2_sigma": float,
    "max_iter": int,
    "tol": float,
    "feature_cutoff": int,
}


@dataclass
class RunConfig:
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    l2_sigma: float = 10.0
    max_iter: int = 200
    tol: float = 1e-5
    feature_cutoff: int = 1
    language: str | None = None
    gazetteer_paths: dict[str, str] = field(default_factory=dict)
    gazetteer_fold_case: dict[str, bool] = field(default_factory=dict)
    explicit_gazetteers: bool = False  # config listed `gazetteers` itself

    def fold_case_for(self, name: str) -> bool:
        if name in self.gazetteer_fold_case:
            return self.gazetteer_fold_case[name]
        if self.language in PRESETS:
            return PRESETS[self.language][2]
        return False


def _convert(key: str, raw: str, kind):
    if kind is bool:
        if raw.lower() not in _BOOL:
            raise ConfigError(f"config key {key!r}: expected a boolean, got {raw!r}")
        return _BOOL[raw.lower()]
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"config key {key!r}: expected {kind.__name__}, got {raw!r}"
        ) from None


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    pairs: list[tuple[str, str]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        seen.add(key)
        pairs.append((key, value))

    run = RunConfig()
    feature_kwargs: dict = {}

    # the preset applies first no matter where the language line sits
    for key, value in pairs:
        if key == "language":
            if value not in PRESETS:
                raise ConfigError(
                    f"unknown language {value!r}; choose from "
                    f"{', '.join(sorted(PRESETS))}"
                )
            run.language = value
            use_capital, slots, _ = PRESETS[value]
            feature_kwargs["use_capital"] = use_capital
            feature_kwargs["gazetteers"] = slots

    for key, value in pairs:
        if key == "language":
            continue
        if key in _FEATURE_KEYS:
            feature_kwargs[key] = _convert(key, value, _FEATURE_KEYS[key])
        elif key in _HYPER_KEYS:
            setattr(run, key, _convert(key, value, _HYPER_KEYS[key]))
        elif key == "verb_tags":
            feature_kwargs["verb_tags"] = frozenset(
                t.strip() for t in value.split(",") if t.strip()
            ) or DEFAULT_VERB_TAGS
        elif key == "gazetteers":
            feature_kwargs["gazetteers"] = tuple(
                t.strip() for t in value.split(",") if t.strip()
            )
            run.explicit_gazetteers = True
        elif key.startswith("gazetteer."):
            rest = key[len("gazetteer."):]
            if rest.endswith(".fold_case"):
                name = rest[: -len(".fold_case")]
                if not name:
                    raise ConfigError(f"unknown config key {key!r}")
                run.gazetteer_fold_case[name] = _convert(key, value, bool)
            elif rest and "." not in rest:
                run.gazetteer_paths[rest] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
        else:
            raise ConfigError(f"unknown config key {key!r}")

    try:
        run.feature = replace(run.feature, **feature_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if run.l2_sigma <= 0:
        raise ConfigError("l2_sigma must be positive")
    if run.max_iter < 1:
        raise ConfigError("max_iter must be at least 1")
    if run.feature_cutoff < 1:
        raise ConfigError("feature_cutoff must be at least 1")
    return run


def parse_config_file(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def resolve_gazetteers(run: RunConfig) -> tuple[str, ...]:
    """Final list of active gazetteer names for this run.

    An explicit `gazetteers` key is authoritative and every listed name
    must have a file; otherwise preset slots are filtered down to the
    names that do, and with no preset every declared file is active.
    """
    if run.explicit_gazetteers:
        missing = [n for n in run.feature.gazetteers if n not in run.gazetteer_paths]
        if missing:
            raise ConfigError(
                f"gazetteer {missing[0]!r} is listed but has no file; add "
                f"gazetteer.{missing[0]} = <path> or pass --gazetteer"
            )
        return run.feature.gazetteers
    if run.language is not None:
        return tuple(n for n in run.feature.gazetteers if n in run.gazetteer_paths)
    return tuple(run.gazetteer_paths)
