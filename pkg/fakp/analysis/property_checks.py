# This code is part of fakp and is licensed under the MIT license.
"""Self-contained suite of the numerical and symmetry properties.

Every check draws its own random inputs from one seeded generator and
reports the largest deviation it observed against a tolerance. Negative
controls pass when the deviation is *above* their tolerance.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from fakp.fa import (
    WrappedFunction,
    group_average,
    signed_permutation_group,
)
from fakp.frames import build_frame, relative_gap, sym_eig, covariance
from fakp.geometry import (
    EuclideanTransform,
    GroupSpec,
    PointCloud,
    act_on_features,
    apply,
    compose,
    random_transform,
)
from fakp.kpconv import (
    KPConvLayer,
    correlation,
    kpconv_forward,
    radius_neighbors,
)
from fakp.models import (
    KPCNNMiniConfig,
    WrapperSettings,
    build_model,
    count_parameters,
)
from fakp.numgraph import (
    BatchNormStats,
    Tensor,
    batch_norm,
    gather_rows,
    gradient_check,
    leaky_relu,
    matmul,
    reduce,
    segment_mean,
    softmax_cross_entropy,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
FRAME_TOL = 1e-8
GRADIENT_TOL = 1e-5
ORACLE_TOL = 1e-12
NEGATIVE_CONTROL_TOL = 1e-3

ALL_GROUPS = tuple(GroupSpec)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float
    expect_above: bool = False
    """Negative control: the check passes if the deviation exceeds the
    tolerance."""

    @property
    def passed(self) -> bool:
        if self.expect_above:
            return self.max_deviation > self.tolerance
        return self.max_deviation < self.tolerance


def suite_model_config(seed: int) -> KPCNNMiniConfig:
    """A small three-block network for the symmetry checks."""
    return KPCNNMiniConfig(num_classes=6, channels=[3, 6, 9],
                           embedding_width=12, radii=[0.8, 1.6, 3.2],
                           subsample_cells=[0.4, 0.8, 1.6], K=5,
                           neighbor_search="grid", cache_size=0, seed=seed)


def generic_cloud(rng: np.random.Generator, n: int = 48) -> np.ndarray:
    """Anisotropic Gaussian cloud with a clearly separated spectrum."""
    while True:
        X = rng.standard_normal((n, 3)) * np.array([1.5, 1.0, 0.6])
        X = X + rng.uniform(-1.0, 1.0, size=3)
        if relative_gap(sym_eig(covariance(X)).eigenvalues) >= 1e-2:
            return X


def _ones(X: np.ndarray) -> np.ndarray:
    return np.ones_like(X)


def _pointwise_layer(rng: np.random.Generator) -> Callable:
    """A KPConv evaluated at the input points, [n x 3] -> [n x 3]."""
    layer = KPConvLayer.create(3, 3, K=4, radius=1.5, sigma_ratio=0.6,
                               rng=rng)

    def fn(X: Tensor, F: Tensor) -> Tensor:
        nbrs = radius_neighbors(X, X, layer.radius, "grid")
        return kpconv_forward(layer, X, F, X, nbrs)

    return fn


def check_frame_equivariance(rng, trials, group: GroupSpec) -> CheckResult:
    worst = 0.0
    expected_size = group.frame_cardinality(3)
    for _ in range(trials):
        X = generic_cloud(rng)
        g = random_transform(group, 2.0, rng)
        frame = build_frame(X, group)
        moved = build_frame(apply(g, X), group)
        if len(frame) != expected_size or len(moved) != expected_size:
            return CheckResult(f"frame equivariance {group.display_name()}",
                               float("inf"), FRAME_TOL)
        for h in frame:
            gh = compose(g, h)
            worst = max(worst, min(gh.max_deviation(k) for k in moved))
    return CheckResult(f"frame equivariance {group.display_name()}", worst,
                       FRAME_TOL)


def check_model_invariance(rng, trials, group: GroupSpec,
                           truncate_frames: bool, seed: int) -> CheckResult:
    model = build_model(suite_model_config(seed))
    wrapped = WrappedFunction(model.forward_single, group, "invariant",
                              max_branches=1 if truncate_frames else None)
    worst = 0.0
    for _ in range(trials):
        X = generic_cloud(rng)
        F = _ones(X)
        g = random_transform(group, 2.0, rng)
        before = wrapped(Tensor(X), Tensor(F)).data
        after = wrapped(Tensor(apply(g, X)),
                        Tensor(act_on_features(g, F, 3))).data
        worst = max(worst, float(np.abs(after - before).max()))
    return CheckResult(f"invariance {group.display_name()}", worst,
                       SYMMETRY_TOL)


def check_equivariance(rng, trials, group: GroupSpec,
                       truncate_frames: bool) -> CheckResult:
    wrapped = WrappedFunction(_pointwise_layer(rng), group, "equivariant",
                              max_branches=1 if truncate_frames else None)
    worst = 0.0
    for _ in range(trials):
        X = generic_cloud(rng, 24)
        F = rng.uniform(-1.0, 1.0, size=X.shape)
        g = random_transform(group, 2.0, rng)
        expected = act_on_features(g, wrapped(Tensor(X), Tensor(F)).data, 3)
        got = wrapped(Tensor(apply(g, X)),
                      Tensor(act_on_features(g, F, 3))).data
        worst = max(worst, float(np.abs(got - expected).max()))
    return CheckResult(f"equivariance {group.display_name()}", worst,
                       SYMMETRY_TOL)


def check_composed(rng, trials) -> CheckResult:
    wrapped = WrappedFunction(_pointwise_layer(rng),
                              GroupSpec.ROTATIONS_REFLECTIONS, "equivariant",
                              composed_with=(GroupSpec.TRANSLATIONS,
                                             "invariant"))
    worst = 0.0
    for _ in range(trials):
        X = generic_cloud(rng, 24)
        F = rng.uniform(-1.0, 1.0, size=X.shape)
        base = wrapped(Tensor(X), Tensor(F)).data
        t = EuclideanTransform.pure_translation(rng.uniform(-2.0, 2.0, 3))
        shifted = wrapped(Tensor(apply(t, X)),
                          Tensor(act_on_features(t, F, 3))).data
        r = random_transform(GroupSpec.ROTATIONS_REFLECTIONS, 1.0, rng)
        turned = wrapped(Tensor(apply(r, X)),
                         Tensor(act_on_features(r, F, 3))).data
        worst = max(worst, float(np.abs(shifted - base).max()),
                    float(np.abs(turned - act_on_features(r, base, 3)).max()))
    return CheckResult("composed T-invariant / O-equivariant", worst,
                       SYMMETRY_TOL)


def check_census_and_cost(rng, seed: int) -> CheckResult:
    """Wrapping adds no parameters and costs one inner pass per frame
    element."""
    config = suite_model_config(seed)
    plain = count_parameters(build_model(config))
    deviation = 0
    for group in ALL_GROUPS:
        model = build_model(config, WrapperSettings(mode="invariant",
                                                    group=group))
        deviation = max(deviation, abs(count_parameters(model) - plain))
        model(PointCloud.from_arrays(generic_cloud(rng)))
        deviation = max(deviation, abs(model.wrapped.inner_calls
                                       - group.frame_cardinality(3)))
    return CheckResult("parameter census and branch count", float(deviation),
                       0.5)


def check_cube_group_average(rng, seed: int) -> CheckResult:
    """Averaging over the 24 rotations of the cube gives a function that is
    invariant under those rotations."""
    cube = signed_permutation_group(3, proper=True)
    model = build_model(suite_model_config(seed))
    X = generic_cloud(rng)
    F = _ones(X)
    reference = group_average(model.forward_single, cube, X, F,
                              "invariant").data
    worst = 0.0
    for i in rng.choice(len(cube), size=3, replace=False):
        h = cube[i]
        moved = group_average(model.forward_single, cube, apply(h, X),
                              act_on_features(h, F, 3), "invariant").data
        worst = max(worst, float(np.abs(moved - reference).max()))
    return CheckResult("cube rotation group average", worst, SYMMETRY_TOL)


def _relative_gradient_errors(rng) -> Iterator[float]:
    def u(*shape):
        return Tensor(rng.uniform(-2.0, 2.0, size=shape), requires_grad=True)

    def weight(*shape):
        return Tensor(rng.uniform(-1.0, 1.0, size=shape))

    def total(y: Tensor, weights: Tensor) -> Tensor:
        # weighted sum so that every output element matters
        out = y * weights
        while out.ndim:
            out = reduce(out, 0, "sum")
        return out

    w_mm, w_act, w_bn = weight(3, 2), weight(4, 3), weight(5, 3)
    yield gradient_check(lambda a, b: total(matmul(a, b), w_mm),
                         [u(3, 4), u(4, 2)])
    yield gradient_check(lambda x: total(leaky_relu(x, 0.1), w_act),
                         [u(4, 3)])
    yield gradient_check(
        lambda x, gm, bt: total(batch_norm(x, gm, bt, 1e-5,
                                           BatchNormStats.fresh(3), True),
                                w_bn),
        [u(5, 3), u(3), u(3)])
    w_red = weight(4)
    for kind in ("sum", "mean", "max"):
        yield gradient_check(lambda x: total(reduce(x, 1, kind), w_red),
                             [u(4, 3)])
    w_gather, w_seg = weight(4, 3), weight(3, 3)
    yield gradient_check(lambda x: total(gather_rows(x, [0, 2, 2, 1]),
                                         w_gather), [u(3, 3)])
    yield gradient_check(lambda x: total(segment_mean(x, [0, 1, 1, 0, 2], 3),
                                         w_seg), [u(5, 3)])
    yield gradient_check(lambda z: softmax_cross_entropy(z, [0, 3, 1]),
                         [u(3, 4)])

    layer = KPConvLayer.create(3, 2, K=3, radius=1.0, sigma_ratio=0.8, rng=rng)
    X = rng.uniform(-0.6, 0.6, size=(8, 3))
    Q = X[:4]
    nbrs = radius_neighbors(X, Q, layer.radius)
    w_conv = weight(4, 2)

    def conv_loss(F, W):
        layer.weights = W
        return total(kpconv_forward(layer, X, F, Q, nbrs), w_conv)

    yield gradient_check(conv_loss, [u(8, 3), u(3, 3, 2)])


def check_gradients(rng) -> CheckResult:
    worst = max(_relative_gradient_errors(rng))
    return CheckResult("finite-difference gradients", worst, GRADIENT_TOL)


def check_neighbor_oracle(rng, trials) -> CheckResult:
    mismatches = 0
    for _ in range(trials):
        n = int(rng.integers(1, 60))
        X = rng.uniform(-1.0, 1.0, size=(n, 3))
        Q = rng.uniform(-1.2, 1.2, size=(int(rng.integers(1, 20)), 3))
        r = float(rng.uniform(0.05, 0.8))
        brute = radius_neighbors(X, Q, r, "bruteforce")
        grid = radius_neighbors(X, Q, r, "grid")
        mismatches += sum(a.tolist() != b.tolist() for a, b in zip(brute, grid))
    return CheckResult("grid vs brute-force neighbors", mismatches, 0.5)


def naive_kpconv(layer: KPConvLayer, X, F, Q, neighbors) -> np.ndarray:
    """Direct double sum over neighbors and kernel points."""
    W = layer.weights.data
    out = np.zeros((len(Q), layer.c_out))
    for q, (query, nbrs) in enumerate(zip(Q, neighbors)):
        for i in nbrs:
            for k, xk in enumerate(layer.disposition.points):
                h = correlation(X[i] - query, xk, layer.sigma)
                out[q] += h * (F[i] @ W[k])
    return out


def check_kpconv_oracle(rng, trials) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 21))
        K = int(rng.integers(1, 5))
        layer = KPConvLayer.create(2, 3, K=K, radius=0.7, sigma_ratio=0.5,
                                   seed=int(rng.integers(1000)), rng=rng)
        X = rng.uniform(-1.0, 1.0, size=(n, 3))
        F = rng.uniform(-1.0, 1.0, size=(n, 2))
        Q = rng.uniform(-1.0, 1.0, size=(4, 3))
        nbrs = radius_neighbors(X, Q, layer.radius)
        got = kpconv_forward(layer, X, Tensor(F), Q, nbrs).data
        worst = max(worst, float(np.abs(got - naive_kpconv(layer, X, F, Q,
                                                           nbrs)).max()))
    return CheckResult("kpconv vs naive double sum", worst, ORACLE_TOL)


def check_unwrapped_not_invariant(rng, trials, seed: int) -> CheckResult:
    model = build_model(suite_model_config(seed))
    worst = 0.0
    for _ in range(max(1, trials // 10)):
        X = generic_cloud(rng)
        F = _ones(X)
        g = random_transform(GroupSpec.ROTATIONS, 1.0, rng)
        before = model.forward_single(Tensor(X), Tensor(F)).data
        after = model.forward_single(Tensor(apply(g, X)),
                                     Tensor(act_on_features(g, F, 3))).data
        worst = max(worst, float(np.abs(after - before).max()))
    return CheckResult("unwrapped model is not rotation invariant", worst,
                       NEGATIVE_CONTROL_TOL, expect_above=True)


def run_property_suite(seed: int = 0, trials: int = 100,
                       truncate_frames: bool = False,
                       progress: Optional[Callable[[CheckResult], None]] = None
                       ) -> list[CheckResult]:
    """Run every check; ``truncate_frames`` keeps a single frame branch in
    the symmetry checks, which must make them fail."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    rng = np.random.default_rng(seed)
    checks = []
    for group in ALL_GROUPS:
        checks.append(lambda g=group: check_frame_equivariance(rng, trials, g))
    for group in ALL_GROUPS:
        checks.append(lambda g=group: check_model_invariance(
            rng, trials, g, truncate_frames, seed))
    for group in ALL_GROUPS:
        checks.append(lambda g=group: check_equivariance(
            rng, trials, g, truncate_frames))
    checks += [
        lambda: check_composed(rng, trials),
        lambda: check_census_and_cost(rng, seed),
        lambda: check_cube_group_average(rng, seed),
        lambda: check_gradients(rng),
        lambda: check_neighbor_oracle(rng, 2 * trials),
        lambda: check_kpconv_oracle(rng, trials),
        lambda: check_unwrapped_not_invariant(rng, trials, seed),
    ]
    results = []
    for check in checks:
        result = check()
        logger.info("%s: max deviation %.3g (tolerance %.3g) %s", result.name,
                    result.max_deviation, result.tolerance,
                    "ok" if result.passed else "FAILED")
        if progress is not None:
            progress(result)
        results.append(result)
    return results
