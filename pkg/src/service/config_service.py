import copy
import logging
import math
from os import environ
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from deepmerge import Merger

from src.model.enums import ControlLaw, StrategyKind
from src.model.errors import ConfigParseError, ConfigValidationError
from src.model.experiment_config import DensitySpec, ExperimentConfig

"""
Parser for experiment documents.

The format is line oriented: `[section]` headers, `key = value` lines and `#` comments.
Sections: domain, sensor, robots, strategy, control, output. List valued keys take comma separated values.
"""

_log = logging.getLogger(__name__)

# Dicts merge key by key, anything else in the document replaces the default
_merger = Merger([(dict, ["merge"])], ["override"], ["override"])


def _number(value: str) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise ValueError(f"'{value}' is not a finite number")
    return number


def _optional_number(value: str) -> Optional[float]:
    return None if value.strip().lower() == 'none' else _number(value)


def _list(convert: Callable[[str], Any]) -> Callable[[str], Tuple]:
    def parse(value: str) -> Tuple:
        items = [v.strip() for v in value.split(',')]
        if not items or any(not v for v in items):
            raise ValueError("empty list entry")
        return tuple(convert(v) for v in items)
    return parse


def _law(value: str) -> ControlLaw:
    value = value.strip().lower()
    if not ControlLaw.has_value(value):
        raise ValueError(f"unknown control law '{value}'")
    return ControlLaw(value)


def _density(value: str) -> DensitySpec:
    """
    `uniform` or `bumps: x,y,sigma,amplitude; x,y,sigma,amplitude; ...`
    """
    kind, _, rest = value.partition(':')
    kind = kind.strip().lower()
    if kind == 'uniform' and not rest.strip():
        return DensitySpec()
    if kind != 'bumps':
        raise ValueError(f"unknown density '{kind}'")
    bumps = []
    for chunk in rest.split(';'):
        values = _list(_number)(chunk)
        if len(values) != 4:
            raise ValueError("a bump needs exactly 4 values: x,y,sigma,amplitude")
        bumps.append(values)
    return DensitySpec('bumps', tuple(bumps))


# section -> key -> converter
SCHEMA: Dict[str, Dict[str, Callable[[str], Any]]] = {
    'domain': {'width': _number, 'height': _number, 'grid_nx': int, 'grid_ny': int, 'density': _density},
    'sensor': {'k': _number, 'alpha': _number, 'range': _list(_optional_number)},
    'robots': {'n_robots': _list(int), 'speed': _list(_number), 'max_speed': _optional_number},
    'strategy': {'kind': _list(StrategyKind.parse), 'epsilon': _number, 'max_steps': int, 'seeds': _list(int)},
    'control': {'k_prop': _number, 'delta': _number, 'd_tol': _number, 'heading_quantum': int,
                'cds_law': _law, 'sds_law': _law},
    'output': {'dir': Path},
}

DEFAULTS: Dict[str, Dict[str, Any]] = {
    'domain': {'width': 10.0, 'height': 10.0, 'grid_nx': 100, 'grid_ny': 100, 'density': DensitySpec()},
    'sensor': {'k': 0.5, 'alpha': 0.5, 'range': (None,)},
    'robots': {'n_robots': (5,), 'speed': (0.5,), 'max_speed': None},
    'strategy': {'kind': (StrategyKind.CDS,), 'epsilon': 0.002, 'max_steps': 2000, 'seeds': (0,)},
    'control': {'k_prop': 1.0, 'delta': 0.3, 'd_tol': 0.3, 'heading_quantum': 1,
                'cds_law': ControlLaw.CONSTANT_SPEED, 'sds_law': ControlLaw.SATURATED},
    'output': {'dir': None},
}


def _read_sections(text: str) -> Dict[str, Dict[str, Any]]:
    """
    Tokenize and convert the document, without any bound checks
    :raise ConfigParseError: on syntax errors, unknown sections/keys, duplicates and unconvertible values
    """
    sections: Dict[str, Dict[str, Any]] = {}
    section: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line.startswith('['):
            if not line.endswith(']'):
                raise ConfigParseError("unterminated section header", line=lineno)
            section = line[1:-1].strip().lower()
            if section not in SCHEMA:
                raise ConfigParseError(f"unknown section [{section}]", line=lineno)
            sections.setdefault(section, {})
            continue
        key, sep, value = line.partition('=')
        key = key.strip().lower()
        if not sep:
            raise ConfigParseError("expected 'key = value'", line=lineno)
        if section is None:
            raise ConfigParseError("key outside of a section", line=lineno, key=key)
        if key not in SCHEMA[section]:
            raise ConfigParseError(f"unknown key in [{section}]", line=lineno, key=key)
        if key in sections[section]:
            raise ConfigParseError("duplicate key", line=lineno, key=key)
        value = value.strip()
        if not value:
            raise ConfigParseError("missing value", line=lineno, key=key)
        try:
            sections[section][key] = SCHEMA[section][key](value)
        except ValueError as e:
            raise ConfigParseError(f"invalid value '{value}' ({e})", line=lineno, key=key) from e
    return sections


def _check(ok: bool, field: str, bound: str, value) -> None:
    if not ok:
        raise ConfigValidationError(field, bound, value)


def validate(merged: Dict[str, Dict[str, Any]]) -> None:
    """
    Check every value against its bounds
    :raise ConfigValidationError: naming the first offending field
    """
    d, s, r, st, c = (merged[k] for k in ('domain', 'sensor', 'robots', 'strategy', 'control'))
    _check(d['width'] > 0, 'width', 'width > 0', d['width'])
    _check(d['height'] > 0, 'height', 'height > 0', d['height'])
    _check(d['grid_nx'] >= 2, 'grid_nx', 'grid_nx >= 2', d['grid_nx'])
    _check(d['grid_ny'] >= 2, 'grid_ny', 'grid_ny >= 2', d['grid_ny'])
    for x, y, sigma, amplitude in d['density'].bumps:
        _check(sigma > 0, 'density', 'bump sigma > 0', sigma)
        _check(amplitude >= 0, 'density', 'bump amplitude >= 0', amplitude)
    _check(len(d['density'].bumps) <= 4, 'density', 'at most 4 bumps', len(d['density'].bumps))
    _check(0 < s['k'] < 1, 'k', '0 < k < 1', s['k'])
    _check(s['alpha'] > 0, 'alpha', 'alpha > 0', s['alpha'])
    for rng in s['range']:
        _check(rng is None or rng > 0, 'range', 'range > 0', rng)
    for n in r['n_robots']:
        _check(n >= 1, 'n_robots', 'N >= 1', n)
    for u in r['speed']:
        _check(u > 0, 'speed', 'speed > 0', u)
    _check(r['max_speed'] is None or r['max_speed'] > 0, 'max_speed', 'max_speed > 0', r['max_speed'])
    _check(st['epsilon'] > 0, 'epsilon', 'epsilon > 0', st['epsilon'])
    _check(st['max_steps'] >= 1, 'max_steps', 'max_steps >= 1', st['max_steps'])
    for seed in st['seeds']:
        _check(seed >= 0, 'seeds', 'seed >= 0', seed)
    _check(c['k_prop'] > 0, 'k_prop', 'k_prop > 0', c['k_prop'])
    _check(c['delta'] > 0, 'delta', 'delta > 0', c['delta'])
    _check(c['d_tol'] > 0, 'd_tol', 'd_tol > 0', c['d_tol'])
    _check(c['heading_quantum'] in (0, 1), 'heading_quantum', 'heading_quantum in {0, 1}', c['heading_quantum'])


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse and validate an experiment document, filling in defaults for everything it leaves out
    :param text: The document
    :raise ConfigParseError: when the document is malformed
    :raise ConfigValidationError: when a value is out of bounds
    :return: The experiment configuration
    """
    merged = _merger.merge(copy.deepcopy(DEFAULTS), _read_sections(text))
    validate(merged)

    d, s, r, st, c = (merged[k] for k in ('domain', 'sensor', 'robots', 'strategy', 'control'))
    out_dir = merged['output']['dir'] or Path(environ.get('APP_OUTPUT_DIR', 'out'))
    return ExperimentConfig(
        width=d['width'], height=d['height'], grid_nx=d['grid_nx'], grid_ny=d['grid_ny'], density=d['density'],
        k=s['k'], alpha=s['alpha'], ranges=s['range'],
        n_robots=r['n_robots'], speeds=r['speed'], max_speed=r['max_speed'],
        strategies=st['kind'], epsilon=st['epsilon'], max_steps=st['max_steps'], seeds=st['seeds'],
        k_prop=c['k_prop'], delta=c['delta'], d_tol=c['d_tol'], heading_quantum=c['heading_quantum'],
        cds_law=c['cds_law'], sds_law=c['sds_law'],
        out_dir=out_dir,
    )


def load_config(path: Path) -> ExperimentConfig:
    """
    Read and parse an experiment document from disk
    """
    _log.debug(f"Loading experiment config from {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return parse_config(f.read())
