"""
Mutual information of finite constellations over complex AWGN.

Every expectation is E_N[log2 sum_i exp(-(|N + d_ki|^2 - |N|^2) / s2)] with
N ~ CN(0, s2), evaluated either on a tensor Gauss-Hermite grid over the two
real noise dimensions or by seeded Monte-Carlo. All log-sum-exp reductions go
through scipy.special.logsumexp (max-subtracted).
"""

import hashlib
import logging
import math
from dataclasses import replace
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import logsumexp

from .constellations import Constellation, pairwise_differences
from .errors import InternalError, InvalidArgumentError
from .models import ChannelInstance, MIEstimate, NoiseRule, QuadratureMethod, Receiver
from .settings import BLOCK_ELEMENTS, DEFAULT_SAMPLES, MC_THRESHOLD

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
LOG2E = math.log2(math.e)


def _check_positive(**values: float):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise InvalidArgumentError(f"{name} must be a positive finite number, got {value!r}")


def resolve_rule(rule: NoiseRule, cardinality: int) -> NoiseRule:
    """Swap quadrature for Monte-Carlo once the point set gets too large."""
    if rule.method == QuadratureMethod.GAUSS_HERMITE and cardinality > MC_THRESHOLD:
        logger.info(f"{cardinality} composite points > {MC_THRESHOLD}: using Monte-Carlo with seed {rule.seed}")
        return NoiseRule.monte_carlo(samples=max(rule.samples, DEFAULT_SAMPLES), seed=rule.seed)
    return rule


def composite_points(c1: Constellation, c2: Constellation, cross_gain: complex, theta: float,
                     power1: float, power2: float, receiver: Receiver) -> np.ndarray:
    """Sum constellation seen at a receiver, flattened with index k1 * M2 + k2.

    R1 sees sqrt(P1) x1 + g e^{j theta} sqrt(P2) x2, R2 sees
    g sqrt(P1) x1 + e^{j theta} sqrt(P2) x2.
    """
    x1 = math.sqrt(power1) * c1.as_array()
    x2 = np.exp(1j * (theta % (2 * math.pi))) * math.sqrt(power2) * c2.as_array()
    if receiver == Receiver.R1:
        points = x1[:, None] + cross_gain * x2[None, :]
    else:
        points = cross_gain * x1[:, None] + x2[None, :]
    return points.ravel()


def canonical_orientation(points: np.ndarray) -> np.ndarray:
    """Rotate a point set so its first largest-magnitude point lies on the positive real axis."""
    mags = np.abs(points)
    peak = mags.max()
    if peak == 0:
        return points
    ref = int(np.argmax(mags >= peak * (1 - 1e-9)))
    return points * (np.conj(points[ref]) / mags[ref])


@lru_cache(maxsize=16)
def _hermite_grid(nodes_per_dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Standard complex nodes z (E|z|^2 = 1) and weights summing to one."""
    x, w = hermgauss(nodes_per_dim)
    z = (x[:, None] + 1j * x[None, :]).ravel()
    weights = (w[:, None] * w[None, :]).ravel() / math.pi
    z.setflags(write=False)
    weights.setflags(write=False)
    return z, weights


def _evaluation_key(points: np.ndarray, noise_var: float, tag: str) -> int:
    digest = hashlib.blake2b(digest_size=8)
    digest.update(tag.encode())
    digest.update(np.ascontiguousarray(points).tobytes())
    digest.update(np.float64(noise_var).tobytes())
    return int.from_bytes(digest.digest(), "little")


def _monte_carlo_noise(rule: NoiseRule, key: int) -> np.ndarray:
    """Standard CN(0, 1) samples from a counter-based stream keyed by (seed, key)."""
    stream = np.random.Generator(np.random.Philox(np.random.SeedSequence([rule.seed, key])))
    draws = stream.standard_normal((rule.samples, 2)) * math.sqrt(0.5)
    return draws[:, 0] + 1j * draws[:, 1]


def _log2_sum_rows(points: np.ndarray, noise: np.ndarray, noise_var: float) -> np.ndarray:
    """For each noise value, the average over k of log2 sum_i exp(-(|n + s_k - s_i|^2 - |n|^2) / s2)."""
    k_total = points.size
    out = np.zeros(noise.size)
    q_chunk = max(1, min(noise.size, BLOCK_ELEMENTS // k_total))
    k_chunk = max(1, BLOCK_ELEMENTS // (k_total * q_chunk))
    for q0 in range(0, noise.size, q_chunk):
        n_conj = np.conj(noise[q0:q0 + q_chunk])[:, None, None]
        for k0 in range(0, k_total, k_chunk):
            d = pairwise_differences(points, slice(k0, k0 + k_chunk))
            # |n + d|^2 - |n|^2 expanded to avoid cancellation
            exponent = -(np.abs(d) ** 2 + 2 * np.real(n_conj * d)) / noise_var
            out[q0:q0 + q_chunk] += logsumexp(exponent, axis=2).sum(axis=1)
    return out / (k_total * LN2)


def _expected_log2_sum(points: np.ndarray, noise_var: float, rule: NoiseRule, tag: str) -> Tuple[float, float, int]:
    points = canonical_orientation(points)
    sigma = math.sqrt(noise_var)

    if rule.method == QuadratureMethod.GAUSS_HERMITE:
        z, weights = _hermite_grid(rule.nodes_per_dim)
        values = _log2_sum_rows(points, sigma * z, noise_var)
        mean, std_error, count = float(weights @ values), 0.0, rule.nodes_per_dim
    else:
        z = _monte_carlo_noise(rule, _evaluation_key(points, noise_var, tag))
        values = _log2_sum_rows(points, sigma * z, noise_var)
        mean = float(values.mean())
        std_error = float(values.std(ddof=1) / math.sqrt(values.size))
        count = rule.samples

    if not (np.all(np.isfinite(values)) and math.isfinite(mean)):
        raise InternalError(f"non-finite expectation for {tag} (noise variance {noise_var!r})")
    return mean, std_error, count


def _finish(upper: float, mean_log: float, std_error: float, rule: NoiseRule, count: int, tag: str) -> MIEstimate:
    estimate = MIEstimate(upper - mean_log, std_error, rule.method, count)
    if estimate.value < -estimate.tolerance or estimate.value > upper + estimate.tolerance:
        raise InternalError(f"{tag} evaluated to {estimate.value!r} bits, outside [0, {upper!r}]")
    return replace(estimate, value=min(max(estimate.value, 0.0), upper))


def conditional_mi(c: Constellation, power: float, noise_var: float, rule: NoiseRule) -> MIEstimate:
    """I(X; sqrt(P) X + N) for a uniform input on c, in bits."""
    _check_positive(power=power, noise_var=noise_var)
    rule = resolve_rule(rule, c.size)
    points = math.sqrt(power) * c.as_array()
    mean_log, std_error, count = _expected_log2_sum(points, noise_var, rule, "conditional")
    return _finish(math.log2(c.size), mean_log, std_error, rule, count, "conditional MI")


def joint_mi(c1: Constellation, c2: Constellation, cross_gain: complex, theta: float,
             power1: float, power2: float, noise_var: float, receiver: Receiver,
             rule: NoiseRule) -> MIEstimate:
    """I(X1, X2; Y) at one receiver, with user 2 rotated by theta."""
    _check_positive(power1=power1, power2=power2, noise_var=noise_var)
    if not math.isfinite(theta):
        raise InvalidArgumentError("theta must be finite")
    cardinality = c1.size * c2.size
    rule = resolve_rule(rule, cardinality)
    points = composite_points(c1, c2, cross_gain, theta, power1, power2, receiver)
    mean_log, std_error, count = _expected_log2_sum(points, noise_var, rule, f"joint-{receiver.value}")
    return _finish(math.log2(cardinality), mean_log, std_error, rule, count, f"joint MI at {receiver.value}")


def pairwise_log_sums(points: np.ndarray, scale: float) -> np.ndarray:
    """Natural log of sum_i exp(-|s_k - s_i|^2 / scale), one entry per k."""
    k_total = points.size
    out = np.empty(k_total)
    k_chunk = max(1, BLOCK_ELEMENTS // k_total)
    for k0 in range(0, k_total, k_chunk):
        d = pairwise_differences(points, slice(k0, k0 + k_chunk))
        out[k0:k0 + k_chunk] = logsumexp(-(np.abs(d) ** 2) / scale, axis=1)
    return out


def jensen_lower_bound(c1: Constellation, c2: Constellation, cross_gain: complex, theta: float,
                       power1: float, power2: float, noise_var: float, receiver: Receiver) -> float:
    """Closed-form lower bound on the joint MI; no noise expectation involved."""
    _check_positive(power1=power1, power2=power2, noise_var=noise_var)
    points = composite_points(c1, c2, cross_gain, theta, power1, power2, receiver)
    # log2(1/2 * sum) = log2(sum) - 1
    terms = pairwise_log_sums(points, 2 * noise_var) / LN2 - 1.0
    if not np.all(np.isfinite(terms)):
        raise InternalError("non-finite term in the Jensen lower bound")
    return math.log2(points.size) - LOG2E - float(terms.mean())


def cc_sum_bound_estimate(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                          theta: float, rule: NoiseRule) -> MIEstimate:
    """The smaller of the two receivers' joint MIs, in bits per channel use."""
    estimates = [
        joint_mi(c1, c2, instance.cross_gain(rx), theta, instance.p1, instance.p2,
                 instance.noise_var(rx), rx, rule)
        for rx in (Receiver.R1, Receiver.R2)
    ]
    return min(estimates, key=lambda e: e.value)


def cc_sum_bound(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                 theta: float, rule: NoiseRule) -> float:
    return cc_sum_bound_estimate(c1, c2, instance, theta, rule).value
