"""
Conditions package
"""

from src.conditions.esi import (
    EsiStatement,
    esi_moment,
    certify,
    theorem1_statement,
    theorem1_identity,
    esi_implications_check,
)

from src.conditions.bernstein import (
    BernsteinFit,
    VFunction,
    fit_bernstein,
    second_moments,
    v_central_check,
    kl_renyi_check,
    kl_renyi_etas,
)

from src.conditions.risk_bound import RiskBound, risk_bound_eval

__all__ = [
    # ESI
    'EsiStatement', 'esi_moment', 'certify', 'theorem1_statement', 'theorem1_identity',
    'esi_implications_check',
    # Bernstein / central
    'BernsteinFit', 'VFunction', 'fit_bernstein', 'second_moments', 'v_central_check',
    'kl_renyi_check', 'kl_renyi_etas',
    # Risk bounds
    'RiskBound', 'risk_bound_eval',
]
