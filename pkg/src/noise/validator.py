"""Audits of the noise and data assumptions on sample fields"""

import itertools
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..utils.errors import AssumptionFailure
from .coefficients import NoiseCoefficients, coercivity_floor, moment_orders

logger = logging.getLogger("sns_levy.noise.validator")

SLACK = 1e-12
MAX_ALL_PAIRS = 24


def default_samples(noise: NoiseCoefficients, count: int = 24, seed: int = 0,
                    unit_modes: int = 16) -> List[np.ndarray]:
    """Zero, the leading unit modes and random fields of several sizes on span(e_1..e_n)"""
    n = noise.n
    rng = np.random.default_rng(np.random.SeedSequence([seed, 21]))
    samples = [np.zeros(n)]
    for i in range(min(n, unit_modes)):
        unit = np.zeros(n)
        unit[i] = 1.0
        samples.append(unit)
    scales = np.geomspace(0.1, 10.0, count)
    for scale in scales:
        samples.append(scale * rng.standard_normal(n) / np.sqrt(n))
    return samples


def _pairs(count: int):
    if count <= MAX_ALL_PAIRS:
        return itertools.combinations(range(count), 2)
    return ((i, i + 1) for i in range(count - 1))


class AssumptionRule:
    """Base class for assumption rules"""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    def validate(self, noise: NoiseCoefficients, samples: Sequence[np.ndarray], t: float = 0.0) -> Dict[str, Any]:
        """Check the rule on the sample fields

        Args:
            noise: Coefficients with declared constants
            samples: Coefficient vectors of length n
            t: Time at which the coefficients are evaluated

        Returns:
            Rule result dictionary
        """
        raise NotImplementedError("Subclasses must implement validate method")

    def _result(self, valid: bool, message: str, **details) -> Dict[str, Any]:
        return {"rule": self.name, "valid": bool(valid), "message": message, "details": details}


class JumpLipschitzRule(AssumptionRule):
    """int |F(u1; y) - F(u2; y)|^2 nu(dy) <= L |u1 - u2|^2"""

    def __init__(self):
        super().__init__("F_lipschitz", "mean-square Lipschitz continuity of F")

    def validate(self, noise, samples, t=0.0):
        declared = noise.constants.L
        worst, witness, skipped = 0.0, None, 0
        for i, j in _pairs(len(samples)):
            gap = float(np.sum((samples[i] - samples[j]) ** 2))
            if gap == 0.0:
                skipped += 1
                continue
            lhs = float(np.dot(noise.mark_weights, [np.sum((noise.jump(t, samples[i], y) - noise.jump(t, samples[j], y)) ** 2)
                                                for y in noise.mark_nodes]))
            ratio = lhs / gap
            if ratio > worst:
                worst, witness = ratio, (i, j)
        valid = worst <= declared * (1.0 + 1e-9) + SLACK
        return self._result(valid, f"worst ratio {worst:.6g} vs declared L={declared:.6g}",
                            worst_ratio=worst, declared=declared, witness=witness, skipped_pairs=skipped)


class JumpGrowthRule(AssumptionRule):
    """int |F(u; y)|^p nu(dy) <= C_p (1 + |u|^p)"""

    def __init__(self, p: float):
        super().__init__(f"F_growth_p{p:g}", f"growth of F in the {p:g}-th moment")
        self.p = p

    def validate(self, noise, samples, t=0.0):
        declared = noise.constants.growth_constant(self.p)
        worst, witness = 0.0, None
        for i, a in enumerate(samples):
            lhs = float(np.dot(noise.mark_weights, [np.linalg.norm(noise.jump(t, a, y)) ** self.p for y in noise.mark_nodes]))
            ratio = lhs / (1.0 + np.linalg.norm(a) ** self.p)
            if ratio > worst:
                worst, witness = ratio, i
        valid = worst <= declared * (1.0 + 1e-9) + SLACK
        return self._result(valid, f"worst ratio {worst:.6g} vs declared C_{self.p:g}={declared:.6g}",
                            worst_ratio=worst, declared=declared, witness=witness, p=self.p)


class JumpSupportRule(AssumptionRule):
    """nu({y : F(u; y) = 0}) = 0 for nonzero u

    The zero field is excluded: linear presets vanish there for every mark.
    """

    def __init__(self):
        super().__init__("F_support", "F vanishes only on a nu-null set of marks")

    def validate(self, noise, samples, t=0.0):
        worst, witness = 0.0, None
        for i, a in enumerate(samples):
            if not np.any(a):
                continue
            null_mass = float(sum(w for y, w in zip(noise.mark_nodes, noise.mark_weights) if not np.any(noise.jump(t, a, y))))
            if null_mass > worst:
                worst, witness = null_mass, i
        valid = worst == 0.0
        return self._result(valid, "F is nonzero nu-almost everywhere" if valid else
                            f"F vanishes on marks of nu-mass {worst:.6g}",
                            null_mass=worst, witness=witness)


class CoercivityRangeRule(AssumptionRule):
    """a in (2 - 2/(3 + gamma), 2]"""

    def __init__(self):
        super().__init__("G_coercivity_range", "coercivity constant inside its admissible range")

    def validate(self, noise, samples, t=0.0):
        a, floor = noise.constants.a, coercivity_floor(noise.constants.gamma)
        valid = floor < a <= 2.0
        return self._result(valid, f"a={a:.6g} {'inside' if valid else 'outside'} ({floor:.6g}, 2]",
                            a=a, floor=floor, gamma=noise.constants.gamma)


class CoercivityRule(AssumptionRule):
    """2<Au, u> - ||G(u)||_HS^2 >= a ||u||^2 - lambda |u|^2 - kappa"""

    def __init__(self):
        super().__init__("G_coercivity", "coercivity of the Stokes form against the Wiener noise energy")

    def validate(self, noise, samples, t=0.0):
        c = noise.constants
        eigen = noise.basis.eigenvalues[:noise.n]
        worst, witness = np.inf, None
        for i, a in enumerate(samples):
            grad_sq = float(np.dot(eigen * a, a))
            lhs = 2.0 * grad_sq - noise.hs_norm_sq(t, a)
            rhs = c.a * grad_sq - c.lam * float(np.dot(a, a)) - c.kappa
            margin = lhs - rhs
            scale = 1.0 + abs(lhs) + abs(rhs)
            if margin / scale < worst:
                worst, witness = margin / scale, i
        valid = worst >= -1e-12
        return self._result(valid, f"smallest relative margin {worst:.6g}",
                            worst_margin=worst, witness=witness, a=c.a, lam=c.lam, kappa=c.kappa)


class DiffusionGrowthRule(AssumptionRule):
    """||G(u)||_{HS(V')}^2 <= C_G (1 + |u|^2)"""

    def __init__(self):
        super().__init__("G_growth", "growth of G into Hilbert-Schmidt operators with values in V'")

    def validate(self, noise, samples, t=0.0):
        declared = noise.constants.C_G
        worst, witness = 0.0, None
        for i, a in enumerate(samples):
            ratio = noise.hs_norm_Vprime_sq(t, a) / (1.0 + float(np.dot(a, a)))
            if ratio > worst:
                worst, witness = ratio, i
        valid = worst <= declared * (1.0 + 1e-9) + SLACK
        return self._result(valid, f"worst ratio {worst:.6g} vs declared C_G={declared:.6g}",
                            worst_ratio=worst, declared=declared, witness=witness)


class DiffusionLipschitzRule(AssumptionRule):
    """||G(u1) - G(u2)||_HS^2 <= L_G ||u1 - u2||_V^2"""

    def __init__(self):
        super().__init__("G_lipschitz", "Lipschitz continuity of G from V into HS operators")

    def validate(self, noise, samples, t=0.0):
        declared = noise.constants.L_G
        eigen = noise.basis.eigenvalues[:noise.n]
        worst, witness, skipped = 0.0, None, 0
        for i, j in _pairs(len(samples)):
            diff = samples[i] - samples[j]
            gap = float(np.dot((1.0 + eigen) * diff, diff))
            if gap == 0.0:
                skipped += 1
                continue
            g = noise.diffusion(t, samples[i]) - noise.diffusion(t, samples[j])
            ratio = float(np.sum(g * g)) / gap
            if ratio > worst:
                worst, witness = ratio, (i, j)
        valid = worst <= declared * (1.0 + 1e-9) + SLACK
        return self._result(valid, f"worst ratio {worst:.6g} vs declared L_G={declared:.6g}",
                            worst_ratio=worst, declared=declared, witness=witness, skipped_pairs=skipped)


class AssumptionValidator:
    """Runs a list of assumption rules and aggregates their results"""

    def __init__(self, noise: NoiseCoefficients, custom_rules: Optional[List[AssumptionRule]] = None):
        """Initialize validator with the rules that apply to the noise

        Args:
            noise: Coefficients under audit
            custom_rules: Optional extra rules
        """
        self.noise = noise
        self.rules = self._initialize_default_rules()
        if custom_rules:
            self.rules.extend(custom_rules)
        logger.info(f"AssumptionValidator initialized with {len(self.rules)} rules for preset {noise.preset}")

    def _initialize_default_rules(self) -> List[AssumptionRule]:
        rules: List[AssumptionRule] = []
        if self.noise.marks is not None and self.noise.marks.total_mass > 0:
            rules.append(JumpLipschitzRule())
            rules.extend(JumpGrowthRule(p) for p in moment_orders(self.noise.constants.gamma))
            rules.append(JumpSupportRule())
        rules.extend([CoercivityRangeRule(), CoercivityRule(), DiffusionGrowthRule(), DiffusionLipschitzRule()])
        return rules

    def add_rule(self, rule: AssumptionRule) -> None:
        self.rules.append(rule)
        logger.info(f"Added assumption rule: {rule.name}")

    def remove_rule(self, rule_name: str) -> bool:
        for i, rule in enumerate(self.rules):
            if rule.name == rule_name:
                self.rules.pop(i)
                logger.info(f"Removed assumption rule: {rule_name}")
                return True
        return False

    def validate(self, samples: Optional[Sequence[np.ndarray]] = None, rule_names: Optional[List[str]] = None,
                 times: Sequence[float] = (0.0,)) -> Dict[str, Any]:
        """Apply all or the named rules at every time

        Returns:
            Aggregated results with pass and fail counts
        """
        samples = list(samples) if samples is not None else default_samples(self.noise)
        rules = [r for r in self.rules if not rule_names or r.name in rule_names]
        rule_results, passed, failed = [], 0, 0
        for rule in rules:
            for t in times:
                try:
                    result = rule.validate(self.noise, samples, t)
                except Exception as e:
                    logger.error(f"Error applying rule {rule.name}: {str(e)}")
                    result = {"rule": rule.name, "valid": False, "message": f"Rule execution failed: {str(e)}",
                              "details": {"error": str(e)}}
                result["time"] = t
                rule_results.append(result)
                if result["valid"]:
                    passed += 1
                else:
                    failed += 1
        valid = failed == 0
        return {
            "valid": valid,
            "message": f"Validation {'passed' if valid else 'failed'}: {passed} passed, {failed} failed",
            "rules_passed": passed,
            "rules_failed": failed,
            "rule_results": rule_results,
        }

    def raise_for_failures(self, results: Dict[str, Any]) -> None:
        """Turn the first failed rule into an AssumptionFailure"""
        for result in results["rule_results"]:
            if not result["valid"]:
                raise AssumptionFailure(result["rule"], result["message"], witness=result["details"])

    def get_available_rules(self) -> List[Dict[str, str]]:
        return [{"name": rule.name, "description": rule.description} for rule in self.rules]


def _rule_audit(noise: NoiseCoefficients, samples, names: List[str]) -> Dict[str, Any]:
    validator = AssumptionValidator(noise)
    return validator.validate(samples, rule_names=names)


def validate_F(noise: NoiseCoefficients, samples: Optional[Sequence[np.ndarray]] = None,
               raise_on_failure: bool = False) -> Dict[str, Any]:
    """Lipschitz, moment growth and support audits of the jump coefficient"""
    if noise.marks is None:
        return {"valid": True, "message": "No jump noise configured", "rules_passed": 0,
                "rules_failed": 0, "rule_results": []}
    names = ["F_lipschitz", "F_support"] + [f"F_growth_p{p:g}" for p in moment_orders(noise.constants.gamma)]
    results = _rule_audit(noise, samples, names)
    if raise_on_failure:
        AssumptionValidator(noise).raise_for_failures(results)
    return results


def validate_G_coercivity(noise: NoiseCoefficients, samples: Optional[Sequence[np.ndarray]] = None,
                          raise_on_failure: bool = False) -> Dict[str, Any]:
    """Coercivity (with the admissible range of a) and V'-growth audits of G"""
    results = _rule_audit(noise, samples, ["G_coercivity_range", "G_coercivity", "G_growth"])
    if raise_on_failure:
        AssumptionValidator(noise).raise_for_failures(results)
    return results


def validate_G_lipschitz(noise: NoiseCoefficients, samples: Optional[Sequence[np.ndarray]] = None,
                         raise_on_failure: bool = False) -> Dict[str, Any]:
    results = _rule_audit(noise, samples, ["G_lipschitz"])
    if raise_on_failure:
        AssumptionValidator(noise).raise_for_failures(results)
    return results


def validate_forcing(u0: np.ndarray, forcing, horizon: float) -> Dict[str, Any]:
    """u0 has a finite H norm and f a finite L^2(0, T; V') norm

    Args:
        u0: Initial coefficients
        forcing: Object with ``l2_vprime_norm(horizon)``
        horizon: T
    """
    h_norm = float(np.linalg.norm(u0))
    f_norm = float(forcing.l2_vprime_norm(horizon)) if forcing is not None else 0.0
    valid = bool(np.isfinite(h_norm) and np.isfinite(f_norm))
    return {"rule": "data_integrability", "valid": valid,
            "message": f"|u0|_H = {h_norm:.6g}, ||f||_L2(V') = {f_norm:.6g}",
            "details": {"u0_H": h_norm, "f_L2_Vprime": f_norm}}
