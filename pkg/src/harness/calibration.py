"""
Pilot runs that freeze the verdict thresholds of calibration.yaml.
"""

from pathlib import Path
from typing import Dict, Optional

import numpy as np
import yaml

from config.experiment_kinds import LawKind
from src.core.error_handler import log_method_call
from src.core.logger import get_logger
from src.core.settings import CONFIG_DIR, SETTINGS
from src.fields.innovations import InnovationModel, MarginalLaw
from src.fields.models import make_orthomartingale_atom, make_product_orthomartingale
from src.harness.experiments import estimate_maximal_norms, window_schedule
from src.lattice.geometry import Window
from src.stats.maximal import dyadic_ratio_diagnostic

logger = get_logger(__name__)

CALIBRATION = SETTINGS['calibration']
GROWTH_EXPONENT = 1.5

# pilot models and windows per dimension
PILOTS = {
    1: {'dyadic': ((3,), (7,)), 'growth': ((9,), (10,))},
    2: {'dyadic': ((3, 3), (5, 5)), 'growth': ((5, 5), (6, 6))},
}

def _pilot_model(d: int):
    if d == 1:
        return make_orthomartingale_atom(InnovationModel.iid(MarginalLaw(LawKind.RADEMACHER), 1))
    return make_product_orthomartingale(d, [LawKind.RADEMACHER] * d)

@log_method_call()
def calibrate(seed: Optional[int] = None,
              replications: Optional[int] = None,
              safety_factor: Optional[float] = None,
              threads: Optional[int] = None,
              path: Optional[Path] = None) -> Dict:
    """
    Regenerate the calibrated caps: pilot maximum times the safety factor.

    Returns:
        Dict: The calibration document that was written
    """
    seed = CALIBRATION['seed'] if seed is None else seed
    replications = replications or CALIBRATION['replications']
    safety_factor = safety_factor or CALIBRATION['safety_factor']
    path = Path(path) if path else CONFIG_DIR / SETTINGS['project']['calibration_file']

    document = {
        'schema_version': 1,
        'source': 'pilot',
        'seed': seed,
        'replications': replications,
        'safety_factor': safety_factor,
        'dyadic_ratio_cap': {},
        'growth_ratio_cap': {},
    }
    for d, pilot in PILOTS.items():
        model = _pilot_model(d)
        windows = [Window.dyadic(w) for w in window_schedule(*pilot['dyadic'])]
        table = dyadic_ratio_diagnostic(model, windows, replications, seed, threads)
        worst = float(np.max(table.ratios[np.isfinite(table.ratios)], initial=1.0))
        document['dyadic_ratio_cap'][f"d{d}"] = round(worst * safety_factor, 6)

        report = estimate_maximal_norms(model, pilot['growth'], GROWTH_EXPONENT, 0.0, replications, seed, threads)
        growth = max(r.value for r in report.records if r.statistic == 'growth')
        document['growth_ratio_cap'][f"d{d}"] = round(growth * safety_factor, 6)
        logger.info(f"Calibrated d={d}: dyadic cap {document['dyadic_ratio_cap'][f'd{d}']}, "
                    f"growth cap {document['growth_ratio_cap'][f'd{d}']}")

    with open(path, 'w') as file:
        file.write("# Frozen verdict thresholds, regenerated by: python app.py calibrate\n")
        yaml.safe_dump(document, file, sort_keys=False)
    logger.info(f"Wrote calibration to {path}")
    return document
