"""
Strict YAML schema of experiment configs.

Every mapping rejects unknown keys and every diagnostic carries the dotted
path of the offending field, e.g. `model.innovation.law`.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import yaml

from config.experiment_kinds import (
    DecompositionVariant,
    ExperimentKind,
    InnovationKind,
    LawKind,
    ModelKind,
    ZBlockVariant
)
from src.core.error_handler import ConfigError, LabError
from src.core.settings import SETTINGS
from src.fields.innovations import InnovationModel, MarginalLaw
from src.fields.models import FieldModel, make_causal_linear, make_orthomartingale_atom
from src.lattice.geometry import LatticeIndex

SCHEMA_VERSION = 1
MAX_EXPONENT = SETTINGS['limits']['max_window_exponent']

TOP_LEVEL_FIELDS = {
    'schema_version', 'experiment', 'd', 'window', 'model', 'p', 'r',
    'replications', 'seed', 'output', 'threads', 'format', 'options'
}

OPTION_DEFAULTS: Dict[ExperimentKind, Dict[str, Any]] = {
    ExperimentKind.MAXIMAL_ESTIMATE: {
        'schedule_start': None,
        'orlicz': False,
        'z_variant': ZBlockVariant.LITERAL.value,
    },
    ExperimentKind.VERIFY_DECOMPOSITION: {
        'variants': [v.value for v in DecompositionVariant],
        'listed_dim1': True,
    },
    ExperimentKind.CHECK_DEVIATION: {
        'n': 32,
        'laws': [LawKind.RADEMACHER.value, LawKind.GAUSSIAN.value],
        'x': [1, 2, 3, 4, 5, 6],
        'y': [8, 16, 32, 64],
        'exact_limit': 20,
    },
    ExperimentKind.CHECK_ORLICZ_LEMMAS: {
        'family_size': 20,
        'r_values': [0, 2],
        'p_values': [1.25, 1.5, 2],
        'series_pairs': [[2, 0], [2, 2], [1, 1]],
        'series_laws': 10,
        'k_max': 40,
        'weak_pairs': 10,
        'refinement': 1.0e-3,
        'stability': 0.05,
    },
    ExperimentKind.SERIES: {
        'n_max': None,
        'monte_carlo': True,
    },
    ExperimentKind.DYADIC_RATIO: {
        'schedule_start': None,
    },
}

@dataclass(frozen=True)
class ModelSpec:
    """
    Field model description.

    coefficients maps offsets j >= 0 to a_j. random_support, when set, asks
    for random_models causal models with integer coefficients drawn on the
    box 0 <= j < random_support.
    """
    kind: ModelKind
    innovation: InnovationModel
    coefficients: Tuple[Tuple[LatticeIndex, float], ...] = ()
    random_support: Optional[LatticeIndex] = None
    random_models: int = 1

    def build(self, seed: int = 0) -> List[FieldModel]:
        """Concrete models; one unless random coefficients were requested."""
        if self.kind == ModelKind.ORTHOMARTINGALE_ATOM:
            return [make_orthomartingale_atom(self.innovation)]
        if self.random_support is None:
            return [make_causal_linear(self.innovation, dict(self.coefficients))]
        rng = np.random.default_rng(seed)
        models = []
        for _ in range(self.random_models):
            values = rng.integers(-3, 4, size=self.random_support)
            if not values.any():
                values[(0,) * len(self.random_support)] = 1
            table = {tuple(int(a) for a in j): float(v) for j, v in np.ndenumerate(values) if v}
            models.append(make_causal_linear(self.innovation, table))
        return models

@dataclass(frozen=True)
class ExperimentConfig:
    kind: ExperimentKind
    d: int
    window: LatticeIndex
    model: Optional[ModelSpec]
    p: Optional[float]
    r: float
    replications: int
    seed: int
    output: Optional[Path] = None
    threads: Optional[int] = None
    format: str = 'csv'
    options: Mapping[str, Any] = field(default_factory=dict)
    source: Optional[Path] = None

    def with_overrides(self, seed: Optional[int] = None, threads: Optional[int] = None,
                       output: Optional[str] = None, format: Optional[str] = None) -> 'ExperimentConfig':
        """Apply command-line overrides."""
        changes = {}
        if seed is not None:
            changes['seed'] = _integer(seed, 'seed', minimum=0)
        if threads is not None:
            changes['threads'] = _integer(threads, 'threads', minimum=1)
        if output is not None:
            changes['output'] = Path(output)
        if format is not None:
            changes['format'] = _choice(format, 'format', ('csv', 'json'))
        return replace(self, **changes)

    def echo(self) -> Dict[str, Any]:
        """Plain-data copy of the config for reports."""
        echo = {
            'schema_version': SCHEMA_VERSION,
            'experiment': self.kind.value,
            'd': self.d,
            'window': list(self.window),
            'p': self.p,
            'r': self.r,
            'replications': self.replications,
            'seed': self.seed,
            'options': _plain(dict(self.options)),
        }
        if self.model is not None:
            echo['model'] = {
                'kind': self.model.kind.value,
                'innovation': {
                    'kind': self.model.innovation.kind.value,
                    'laws': [law.kind.value for law in self.model.innovation.laws],
                },
                'coefficients': [{'index': list(j), 'value': v} for j, v in self.model.coefficients],
                'random_support': list(self.model.random_support) if self.model.random_support else None,
                'random_models': self.model.random_models,
            }
        return echo

def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value

def _path(parent: str, key) -> str:
    return f"{parent}.{key}" if parent else str(key)

def _mapping(value, path: str, allowed: set, required: set = frozenset()) -> Mapping:
    if not isinstance(value, Mapping):
        raise ConfigError("expected a mapping", path)
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"unknown field '{unknown[0]}'", _path(path, unknown[0]))
    for key in sorted(required):
        if key not in value:
            raise ConfigError("missing required field", _path(path, key))
    return value

def _integer(value, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", path)
    return int(value)

def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    return float(value)

def _choice(value, path: str, choices: Tuple[str, ...]) -> str:
    if value not in choices:
        raise ConfigError(f"expected one of {', '.join(choices)}, got {value!r}", path)
    return value

def _index(value, path: str, d: int, minimum: int = 0) -> LatticeIndex:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool) and d == 1:
        value = [value]
    if not isinstance(value, (list, tuple)) or len(value) != d:
        raise ConfigError(f"expected a list of {d} integers, got {value!r}", path)
    return tuple(_integer(a, f"{path}[{q}]", minimum) for q, a in enumerate(value))

def _marginal(value, path: str) -> MarginalLaw:
    if isinstance(value, str):
        value = {'kind': value}
    spec = _mapping(value, path, {'kind', 'p', 'atoms'}, {'kind'})
    kind = LawKind(_choice(spec['kind'], _path(path, 'kind'), tuple(k.value for k in LawKind)))
    atoms = ()
    if kind == LawKind.DISCRETE:
        raw = spec.get('atoms')
        if not isinstance(raw, list) or not raw:
            raise ConfigError("discrete law needs a non-empty atoms list", _path(path, 'atoms'))
        pairs = []
        for i, pair in enumerate(raw):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError("atom must be [value, probability]", f"{path}.atoms[{i}]")
            pairs.append((_number(pair[0], f"{path}.atoms[{i}][0]"), _number(pair[1], f"{path}.atoms[{i}][1]")))
        atoms = tuple(pairs)
    try:
        return MarginalLaw(kind, _number(spec.get('p', 0.5), _path(path, 'p')), atoms)
    except LabError as e:
        raise ConfigError(str(e), path)

def _innovation(value, path: str, d: int) -> InnovationModel:
    spec = _mapping(value, path, {'kind', 'law', 'laws'}, {'kind'})
    kind = InnovationKind(_choice(spec['kind'], _path(path, 'kind'), tuple(k.value for k in InnovationKind)))
    if kind == InnovationKind.IID:
        if 'law' not in spec:
            raise ConfigError("missing required field", _path(path, 'law'))
        return InnovationModel.iid(_marginal(spec['law'], _path(path, 'law')), d)
    laws = spec.get('laws')
    if not isinstance(laws, list) or len(laws) != d:
        raise ConfigError(f"product innovations need a list of {d} laws", _path(path, 'laws'))
    return InnovationModel.product([_marginal(law, f"{path}.laws[{q}]") for q, law in enumerate(laws)])

def parse_model(value, path: str, d: int) -> ModelSpec:
    spec = _mapping(value, path, {'kind', 'innovation', 'coefficients', 'random_coefficients'},
                    {'kind', 'innovation'})
    kind = ModelKind(_choice(spec['kind'], _path(path, 'kind'), tuple(k.value for k in ModelKind)))
    innovation = _innovation(spec['innovation'], _path(path, 'innovation'), d)

    if kind == ModelKind.ORTHOMARTINGALE_ATOM:
        for key in ('coefficients', 'random_coefficients'):
            if key in spec:
                raise ConfigError("not allowed for the orthomartingale atom model", _path(path, key))
        return ModelSpec(kind, innovation)

    if 'random_coefficients' in spec:
        random_path = _path(path, 'random_coefficients')
        random = _mapping(spec['random_coefficients'], random_path, {'support', 'models'}, {'support'})
        support = _index(random['support'], _path(random_path, 'support'), d, minimum=1)
        models = _integer(random.get('models', 1), _path(random_path, 'models'), minimum=1)
        return ModelSpec(kind, innovation, (), support, models)

    entries = spec.get('coefficients')
    coefficient_path = _path(path, 'coefficients')
    if not isinstance(entries, list):
        raise ConfigError("expected a list of {index, value} entries", coefficient_path)
    table = {}
    for i, entry in enumerate(entries):
        entry_path = f"{coefficient_path}[{i}]"
        entry = _mapping(entry, entry_path, {'index', 'value'}, {'index', 'value'})
        j = _index(entry['index'], _path(entry_path, 'index'), d)
        table[j] = table.get(j, 0.0) + _number(entry['value'], _path(entry_path, 'value'))
    return ModelSpec(kind, innovation, tuple(sorted(table.items())))

def _boolean(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", path)
    return value

def _list(value, path: str) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"expected a non-empty list, got {value!r}", path)
    return value

def _bounded(value, path: str, lower: Optional[float] = None, strict: bool = False,
             upper: Optional[float] = None) -> float:
    x = _number(value, path)
    below = lower is not None and (x <= lower if strict else x < lower)
    if below or (upper is not None and x > upper):
        low = f"{'(' if strict else '['}{lower if lower is not None else '-inf'}"
        raise ConfigError(f"must lie in {low}, {upper if upper is not None else 'inf'}], got {x}", path)
    return x

def _numbers(value, path: str, lower: Optional[float] = None, strict: bool = False,
             upper: Optional[float] = None) -> List[float]:
    return [_bounded(x, f"{path}[{i}]", lower, strict, upper) for i, x in enumerate(_list(value, path))]

def _options(kind: ExperimentKind, value, d: int) -> Dict[str, Any]:
    defaults = OPTION_DEFAULTS[kind]
    spec = _mapping(value or {}, 'options', set(defaults))
    options = dict(defaults)
    options.update(spec)

    if kind in (ExperimentKind.MAXIMAL_ESTIMATE, ExperimentKind.DYADIC_RATIO) and options['schedule_start'] is not None:
        options['schedule_start'] = _index(options['schedule_start'], 'options.schedule_start', d)
    if kind == ExperimentKind.MAXIMAL_ESTIMATE:
        options['orlicz'] = _boolean(options['orlicz'], 'options.orlicz')
        _choice(options['z_variant'], 'options.z_variant', tuple(v.value for v in ZBlockVariant))
    if kind == ExperimentKind.VERIFY_DECOMPOSITION:
        variants = _list(options['variants'], 'options.variants')
        for i, variant in enumerate(variants):
            _choice(variant, f"options.variants[{i}]", tuple(v.value for v in DecompositionVariant))
        options['listed_dim1'] = _boolean(options['listed_dim1'], 'options.listed_dim1')
    if kind == ExperimentKind.CHECK_DEVIATION:
        options['n'] = _integer(options['n'], 'options.n', minimum=1)
        for i, law in enumerate(_list(options['laws'], 'options.laws')):
            _choice(law, f"options.laws[{i}]", (LawKind.RADEMACHER.value, LawKind.GAUSSIAN.value,
                                                 LawKind.TWO_POINT.value, LawKind.HEAVY_TAIL.value))
        options['x'] = _numbers(options['x'], 'options.x', lower=0.0)
        options['y'] = _numbers(options['y'], 'options.y', lower=0.0, strict=True)
        options['exact_limit'] = _integer(options['exact_limit'], 'options.exact_limit', minimum=0)
    if kind == ExperimentKind.CHECK_ORLICZ_LEMMAS:
        for key in ('family_size', 'series_laws', 'k_max'):
            options[key] = _integer(options[key], f"options.{key}", minimum=1)
        options['weak_pairs'] = _integer(options['weak_pairs'], 'options.weak_pairs', minimum=0)
        options['r_values'] = _numbers(options['r_values'], 'options.r_values', lower=0.0)
        options['p_values'] = _numbers(options['p_values'], 'options.p_values', lower=1.0, strict=True, upper=2.0)
        pairs = _list(options['series_pairs'], 'options.series_pairs')
        options['series_pairs'] = []
        for i, pair in enumerate(pairs):
            path = f"options.series_pairs[{i}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"expected a [p, q] pair, got {pair!r}", path)
            options['series_pairs'].append([_bounded(pair[0], f"{path}[0]", lower=1.0),
                                            _bounded(pair[1], f"{path}[1]", lower=0.0)])
        options['refinement'] = _bounded(options['refinement'], 'options.refinement',
                                         lower=0.0, strict=True, upper=0.5)
        options['stability'] = _bounded(options['stability'], 'options.stability', lower=0.0)
    if kind == ExperimentKind.SERIES:
        if options['n_max'] is not None:
            options['n_max'] = _index(options['n_max'], 'options.n_max', d, minimum=1)
        options['monte_carlo'] = _boolean(options['monte_carlo'], 'options.monte_carlo')
    return options

def parse_config(raw: Mapping, source: Optional[Path] = None) -> ExperimentConfig:
    """
    Validate a parsed YAML document.

    Raises:
        ConfigError: With the dotted path of the first offending field
    """
    spec = _mapping(raw, '', TOP_LEVEL_FIELDS, {'schema_version', 'experiment', 'd', 'replications', 'seed'})
    if spec['schema_version'] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {spec['schema_version']!r}, expected {SCHEMA_VERSION}",
                          'schema_version')
    try:
        kind = ExperimentKind.from_string(spec['experiment'])
    except ValueError as e:
        raise ConfigError(str(e), 'experiment')
    d = _integer(spec['d'], 'd', minimum=1)
    window = _index(spec.get('window', [0] * d), 'window', d)
    if any(a > MAX_EXPONENT for a in window):
        raise ConfigError(f"window exponents must be <= {MAX_EXPONENT}", 'window')

    needs_model = kind not in (ExperimentKind.CHECK_DEVIATION, ExperimentKind.CHECK_ORLICZ_LEMMAS)
    if needs_model and 'model' not in spec:
        raise ConfigError("missing required field", 'model')
    model = parse_model(spec['model'], 'model', d) if 'model' in spec else None

    p = _number(spec['p'], 'p') if spec.get('p') is not None else None
    if kind == ExperimentKind.MAXIMAL_ESTIMATE and (p is None or not 1 < p <= 2):
        raise ConfigError(f"p must lie in (1, 2], got {p}", 'p')
    r = _number(spec.get('r', 0.0), 'r')
    if r < 0:
        raise ConfigError(f"r must be >= 0, got {r}", 'r')

    output = spec.get('output')
    threads = spec.get('threads')
    return ExperimentConfig(
        kind=kind,
        d=d,
        window=window,
        model=model,
        p=p,
        r=r,
        replications=_integer(spec['replications'], 'replications', minimum=1),
        seed=_integer(spec['seed'], 'seed', minimum=0),
        output=Path(output) if output else None,
        threads=_integer(threads, 'threads', minimum=1) if threads is not None else None,
        format=_choice(spec.get('format', SETTINGS['report']['default_format']), 'format', ('csv', 'json')),
        options=_options(kind, spec.get('options'), d),
        source=source,
    )

def load_experiment_config(path) -> ExperimentConfig:
    """
    Read and validate an experiment config file.

    Raises:
        ConfigError: If the file is missing, is not YAML or fails the schema
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, 'r') as file:
            raw = yaml.safe_load(file)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}")
    if raw is None:
        raise ConfigError("config file is empty")
    return parse_config(raw, path)
