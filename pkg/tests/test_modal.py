"""
Tests for the two-layer collocation eigenproblem: assembly, reduction,
filtering, normalization and the published wavenumber tables.
"""

from __future__ import annotations

import math
import os
import sys
import unittest
from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

import numpy as np

PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from core.baselines import analytic_iso_wavenumbers  # noqa: E402
from core.cheb import barycentric_interpolate, cgl_points, diff_matrix  # noqa: E402
from core.errors import (  # noqa: E402
    DegenerateConstraintsError,
    DegenerateModeError,
    NoPropagatingModesError,
)
from core.modal import (  # noqa: E402
    apply_constraints,
    assemble_modes,
    discretize_layer,
    normalize_modes,
    recover_boundary,
    schur_reduce,
    solve_modes,
)
from models.environment import (  # noqa: E402
    AnalyticIsoSpec,
    BottomBC,
    EnvironmentSpec,
    LayerProfiles,
    Profile,
)
from services.run_service import apply_overrides  # noqa: E402
from utils.env_lib import load_env_file  # noqa: E402

ENV_DIR = PROJECT_ROOT / "envs"
RUN_SLOW = os.environ.get("NMODE_RUN_SLOW", "").strip().lower() in ("1", "true", "yes", "on")

FREE_ISO_KR = {
    20.0: [0.0776622489, 0.0554124859],
    50.0: [0.2070699109, 0.1997925591, 0.1870354632, 0.1675516082, 0.1385312147, 0.0912925660],
}
RIGID_ISO_KR = {
    20.0: [0.0822900069, 0.0692656074, 0.0291527460],
    50.0: [0.2088496309, 0.2040692222, 0.1941556223, 0.1782544335, 0.1545281836, 0.1183611217],
}
LOSSY_BOTTOM_KR = {
    20.0: [0.0735028581 + 0.3759726294e-3j, 0.0404098897 + 0.2375723752e-2j],
    50.0: [
        0.2032961543 + 0.1455280251e-3j,
        0.1832016596 + 0.7180523083e-3j,
        0.1634865836 + 0.4489227771e-2j,
        0.1419594443 + 0.2610178399e-2j,
        0.1137157329 + 0.4726124780e-2j,
    ],
}
MUNK_KR = {
    1: 0.2093735621,
    2: 0.2092424310,
    3: 0.2091122288,
    70: 0.1948569442,
    71: 0.1944647584,
    72: 0.1940660923,
}


def layers(speed: float, rho, alpha: float = 0.0) -> LayerProfiles:
    rho_profile = rho if isinstance(rho, Profile) else Profile.constant(rho)
    return LayerProfiles(
        ssp=Profile.constant(speed), rho=rho_profile, alpha=Profile.constant(alpha)
    )


def iso_env(freq: float, n_water: int, n_bottom: int, bc: BottomBC = BottomBC.FREE, **extra) -> EnvironmentSpec:
    return EnvironmentSpec(
        title="iso",
        freq_hz=freq,
        source_depth_m=36.0,
        h_m=50.0,
        big_h_m=100.0,
        water=layers(1500.0, 1.0),
        bottom=layers(1500.0, 1.0),
        bottom_bc=bc,
        n_water=n_water,
        n_bottom=n_bottom,
        **extra,
    )


def lossy_env(freq: float, n: int = 20) -> EnvironmentSpec:
    return EnvironmentSpec(
        title="lossy",
        freq_hz=freq,
        source_depth_m=36.0,
        h_m=50.0,
        big_h_m=100.0,
        water=layers(1500.0, 1.0),
        bottom=layers(1800.0, 1.5, 1.5),
        bottom_bc=BottomBC.FREE,
        n_water=n,
        n_bottom=n,
    )


def example(index: int, **overrides) -> EnvironmentSpec:
    return apply_overrides(load_env_file(str(ENV_DIR / f"example{index}.env")), **overrides)


class DiscretizeLayerTest(unittest.TestCase):
    def test_constant_density_cancels(self) -> None:
        omega = 2.0 * math.pi * 50.0
        layer = discretize_layer(layers(1500.0, 1.0), 0.0, 100.0, 6, omega)
        d = diff_matrix(cgl_points(6, 0.0, 100.0)).entries
        d2 = d @ d
        k0 = omega / 1500.0
        self.assertAlmostEqual(k0, 0.20943951, places=8)
        expected = d2 + k0**2 * np.eye(7)
        self.assertLess(np.abs(layer.operator - expected).max(), 1e-10 * np.abs(d2).max())

    def test_density_gradient_contributes(self) -> None:
        omega = 2.0 * math.pi * 50.0
        layer = discretize_layer(
            layers(1700.0, Profile.named("exp_density")), 3000.0, 5000.0, 12, omega
        )
        d = layer.diff.entries
        plain = d @ d + np.diag(layer.k2)
        self.assertGreater(np.abs(layer.operator - plain).max(), 1e-8)

    def test_samples_profiles_at_nodes(self) -> None:
        layer = discretize_layer(layers(1800.0, 1.5, 1.5), 50.0, 100.0, 8, 100.0)
        np.testing.assert_allclose(layer.rho, 1.5)
        self.assertTrue(np.all(layer.k2.imag > 0.0))


class ConstraintAndReductionTest(unittest.TestCase):
    def setUp(self) -> None:
        omega = 2.0 * math.pi * 50.0
        self.water = discretize_layer(layers(1500.0, 1.0), 0.0, 50.0, 20, omega)
        self.bottom = discretize_layer(layers(1800.0, 1.5, 1.5), 50.0, 100.0, 20, omega)

    def test_constraint_rows(self) -> None:
        system = apply_constraints(self.water, self.bottom, BottomBC.FREE)
        m = system.matrix
        self.assertEqual(m.shape, (42, 42))
        self.assertEqual(system.constraint_rows, (0, 20, 21, 41))
        np.testing.assert_array_equal(m[0], np.eye(42)[0])
        self.assertEqual(m[20, 20], 1.0)
        self.assertEqual(m[20, 21], -1.0)
        self.assertEqual(np.count_nonzero(m[20]), 2)
        np.testing.assert_allclose(m[21, :21], self.water.diff.entries[-1] / 1.0)
        np.testing.assert_allclose(m[21, 21:], -self.bottom.diff.entries[0] / 1.5)
        np.testing.assert_array_equal(m[41], np.eye(42)[41])
        np.testing.assert_array_equal(np.nonzero(system.rhs_mask == 0.0)[0], [0, 20, 21, 41])

    def test_rigid_bottom_row(self) -> None:
        system = apply_constraints(self.water, self.bottom, BottomBC.RIGID)
        np.testing.assert_allclose(system.matrix[41, 21:], self.bottom.diff.entries[-1])
        np.testing.assert_array_equal(system.matrix[41, :21], 0.0)

    def test_reduced_dimensions(self) -> None:
        omega = 2.0 * math.pi * 50.0
        water = discretize_layer(layers(1500.0, 1.0), 0.0, 50.0, 40, omega)
        bottom = discretize_layer(layers(1500.0, 1.0), 50.0, 100.0, 40, omega)
        reduction = schur_reduce(apply_constraints(water, bottom, BottomBC.FREE))
        self.assertEqual(reduction.matrix.shape, (78, 78))
        self.assertTrue(np.all(np.any(reduction.matrix != 0.0, axis=0)))
        self.assertTrue(np.all(np.any(reduction.matrix != 0.0, axis=1)))

    def test_unequal_orders(self) -> None:
        omega = 2.0 * math.pi * 20.0
        water = discretize_layer(layers(1500.0, 1.0), 0.0, 50.0, 14, omega)
        bottom = discretize_layer(layers(1500.0, 1.0), 50.0, 100.0, 9, omega)
        reduction = schur_reduce(apply_constraints(water, bottom, BottomBC.FREE))
        self.assertEqual(reduction.matrix.shape, (21, 21))

    def test_recovered_boundary_satisfies_constraints(self) -> None:
        system = apply_constraints(self.water, self.bottom, BottomBC.FREE)
        reduction = schur_reduce(system)
        rng = np.random.default_rng(1)
        psi1 = rng.standard_normal(reduction.interior.size) + 1j * rng.standard_normal(reduction.interior.size)
        psi2 = recover_boundary(psi1, reduction)
        scale = np.abs(psi1).max()
        self.assertLess(abs(psi2[0]), 1e-12 * scale)
        self.assertLess(abs(psi2[1] - psi2[2]), 1e-12 * scale)
        self.assertLess(abs(psi2[3]), 1e-12 * scale)

        water, bottom = assemble_modes(psi1, reduction)
        full = np.concatenate([water[:, 0], bottom[:, 0]])
        residual = system.matrix[list(system.constraint_rows)] @ full
        self.assertLess(np.abs(residual).max(), 1e-10 * np.abs(system.matrix).max() * scale)

    def test_ill_conditioned_constraints_raise(self) -> None:
        system = apply_constraints(self.water, self.bottom, BottomBC.FREE)
        with patch("core.modal.L22_COND_LIMIT", 1.0):
            with self.assertRaises(DegenerateConstraintsError):
                schur_reduce(system)


class SolveModesTest(unittest.TestCase):
    def assert_mode_invariants(self, modes) -> None:
        np.testing.assert_allclose(modes.norm_integrals(), 1.0, atol=1e-8)
        continuity = np.abs(modes.modes_water[-1] - modes.modes_bottom[0])
        self.assertLess(continuity.max(), 1e-8)
        for layer, shapes in ((modes.water, modes.modes_water), (modes.bottom, modes.modes_bottom)):
            residual = layer.operator @ shapes - shapes * (modes.wavenumbers**2)[None, :]
            norm = np.abs(layer.operator).sum(axis=1).max()
            self.assertLess(np.abs(residual[1:-1]).max(), 1e-6 * norm)
        self.assertTrue(np.all(np.diff(modes.wavenumbers.real) <= 0.0))
        self.assertTrue(np.all(modes.wavenumbers.imag >= 0.0))

    def test_free_bottom_wavenumbers(self) -> None:
        for freq, n in ((20.0, 10), (50.0, 20)):
            with self.subTest(freq=freq):
                modes = solve_modes(iso_env(freq, n, n))
                expected = FREE_ISO_KR[freq]
                self.assertEqual(modes.n_modes, len(expected))
                np.testing.assert_allclose(modes.wavenumbers.real, expected, rtol=0.0, atol=1e-10)
                np.testing.assert_array_equal(modes.wavenumbers.imag, 0.0)

    def test_rigid_bottom_wavenumbers(self) -> None:
        for freq, n in ((20.0, 12), (50.0, 20)):
            with self.subTest(freq=freq):
                modes = solve_modes(iso_env(freq, n, n, BottomBC.RIGID))
                expected = RIGID_ISO_KR[freq]
                # the listed column stops at m = 6; a seventh mode propagates at 50 Hz
                self.assertEqual(modes.n_modes, {20.0: 3, 50.0: 7}[freq])
                np.testing.assert_allclose(modes.wavenumbers.real[: len(expected)], expected, rtol=0.0, atol=1e-9)

    def test_attenuating_bottom_wavenumbers(self) -> None:
        for freq in (20.0, 50.0):
            with self.subTest(freq=freq):
                modes = solve_modes(lossy_env(freq))
                expected = np.array(LOSSY_BOTTOM_KR[freq])
                got = modes.wavenumbers[: expected.size]
                np.testing.assert_allclose(got.real, expected.real, rtol=0.0, atol=1e-9)
                np.testing.assert_allclose(got.imag, expected.imag, rtol=0.0, atol=1e-9)

    def test_single_medium_matches_analytic(self) -> None:
        for bc in (BottomBC.FREE, BottomBC.RIGID):
            with self.subTest(bc=bc):
                modes = solve_modes(iso_env(50.0, 20, 20, bc))
                spec = AnalyticIsoSpec(depth_h=100.0, speed=1500.0, bc=bc, freq_hz=50.0)
                analytic = analytic_iso_wavenumbers(spec, modes.n_modes)
                np.testing.assert_allclose(modes.wavenumbers, analytic, rtol=0.0, atol=1e-10)

    def test_phase_speed_window(self) -> None:
        # cp <= 1600 m/s keeps kr >= ω/1600
        modes = solve_modes(iso_env(50.0, 20, 20, cp_max_mps=1600.0))
        self.assertEqual(modes.n_modes, 2)
        self.assertTrue(np.all(modes.phase_speeds <= 1600.0))

        lower = solve_modes(iso_env(50.0, 20, 20, cp_min_mps=2000.0))
        self.assertTrue(np.all(lower.phase_speeds >= 2000.0))
        self.assertEqual(lower.n_modes, 2)

    def test_empty_window_raises(self) -> None:
        with self.assertRaises(NoPropagatingModesError) as ctx:
            solve_modes(iso_env(20.0, 10, 10, cp_max_mps=1000.0))
        self.assertIn("no propagating modes", str(ctx.exception))

    def test_invariants_hold_for_examples(self) -> None:
        cases = {
            1: dict(),
            2: dict(),
            3: dict(),
            4: dict(freq_hz=50.0),
            6: dict(freq_hz=30.0, n_water=60, n_bottom=60),
        }
        for index, overrides in cases.items():
            with self.subTest(example=index):
                self.assert_mode_invariants(solve_modes(example(index, **overrides)))

    def test_lossy_normalization_is_complex_unity(self) -> None:
        modes = solve_modes(lossy_env(50.0))
        integrals = modes.norm_integrals()
        self.assertTrue(np.any(np.abs(modes.modes_bottom.imag) > 1e-8))
        np.testing.assert_allclose(integrals.real, 1.0, atol=1e-8)
        np.testing.assert_allclose(integrals.imag, 0.0, atol=1e-8)

    def test_rigid_bottom_derivative_vanishes(self) -> None:
        modes = solve_modes(iso_env(50.0, 20, 20, BottomBC.RIGID))
        slope = modes.bottom.diff.entries[-1] @ modes.modes_bottom
        peak = np.abs(modes.union_modes()).max(axis=0)
        self.assertTrue(np.all(np.abs(slope) < 1e-6 * peak))

    def test_free_bottom_mode_vanishes(self) -> None:
        modes = solve_modes(iso_env(50.0, 20, 20))
        self.assertLess(np.abs(modes.modes_bottom[-1]).max(), 1e-12)
        self.assertLess(np.abs(modes.modes_water[0]).max(), 1e-12)

    def test_analytic_mode_shapes(self) -> None:
        modes = solve_modes(iso_env(50.0, 20, 20))
        rng = np.random.default_rng(2)
        z = np.sort(rng.uniform(0.0, 50.0, 20))
        for m in range(modes.n_modes):
            got = barycentric_interpolate(modes.grid_water, modes.modes_water[:, m], z)
            expected = math.sqrt(2.0 / 100.0) * np.sin((m + 1) * math.pi * z / 100.0)
            sign = 1.0 if np.real(np.vdot(expected, got)) >= 0.0 else -1.0
            np.testing.assert_allclose(got.real, sign * expected, atol=1e-8)

    def test_union_grid(self) -> None:
        modes = solve_modes(iso_env(20.0, 10, 14))
        depths = modes.union_depths()
        self.assertEqual(depths.size, 10 + 14 + 1)
        self.assertTrue(np.all(np.diff(depths) > 0.0))
        self.assertEqual(modes.union_modes().shape, (25, modes.n_modes))

    def test_truncation_override(self) -> None:
        modes = solve_modes(iso_env(20.0, 10, 10), n_water=12, n_bottom=8)
        self.assertEqual(modes.grid_water.n_order, 12)
        self.assertEqual(modes.grid_bottom.n_order, 8)

    def test_spectral_convergence(self) -> None:
        spec = AnalyticIsoSpec(depth_h=100.0, speed=1500.0, bc=BottomBC.FREE, freq_hz=50.0)
        analytic = analytic_iso_wavenumbers(spec, 6).real

        def error(n_total: int) -> float:
            kr = solve_modes(iso_env(50.0, n_total // 2, n_total - n_total // 2)).wavenumbers
            count = min(kr.size, analytic.size)
            return float(np.abs(kr[:count] - analytic[:count]).max())

        coarse, fine = error(20), error(50)
        self.assertLessEqual(fine, 1e-12)
        self.assertLessEqual(fine, 1e-4 * coarse)


class NormalizeModesTest(unittest.TestCase):
    def test_scaling_invariance(self) -> None:
        for env in (iso_env(50.0, 20, 20), lossy_env(50.0)):
            with self.subTest(env=env.title):
                modes = solve_modes(env)
                c = 0.3 - 2.0j
                scaled = replace(
                    modes,
                    modes_water=modes.modes_water * c,
                    modes_bottom=modes.modes_bottom * c,
                )
                normalize_modes(scaled)
                np.testing.assert_allclose(scaled.modes_water, modes.modes_water, atol=1e-10)
                np.testing.assert_allclose(scaled.modes_bottom, modes.modes_bottom, atol=1e-10)

    def test_idempotent(self) -> None:
        modes = solve_modes(lossy_env(20.0))
        before = modes.modes_water.copy()
        normalize_modes(modes)
        np.testing.assert_allclose(modes.modes_water, before, atol=1e-12)

    def test_sine_mode_scale_factor(self) -> None:
        modes = solve_modes(iso_env(50.0, 20, 20))
        zw, zb = modes.grid_water.points, modes.grid_bottom.points
        raw = replace(
            modes,
            modes_water=np.sin(math.pi * zw / 100.0)[:, None] + 0j,
            modes_bottom=np.sin(math.pi * zb / 100.0)[:, None] + 0j,
            wavenumbers=modes.wavenumbers[:1],
        )
        normalize_modes(raw)
        np.testing.assert_allclose(
            raw.modes_water[:, 0].real, math.sqrt(2.0 / 100.0) * np.sin(math.pi * zw / 100.0), atol=1e-12
        )

    def test_sign_fix_makes_peak_positive(self) -> None:
        modes = solve_modes(lossy_env(50.0))
        union = modes.union_modes()
        for m in range(modes.n_modes):
            column = union[:, m]
            peak = column[np.argmax(np.abs(column) >= (1.0 - 1e-6) * np.abs(column).max())]
            self.assertGreater(peak.real, 0.0)

    def test_vanishing_mode_raises(self) -> None:
        modes = solve_modes(iso_env(20.0, 10, 10))
        zero = replace(
            modes,
            modes_water=np.zeros_like(modes.modes_water),
            modes_bottom=np.zeros_like(modes.modes_bottom),
        )
        with self.assertRaises(DegenerateModeError):
            normalize_modes(zero)


@unittest.skipUnless(RUN_SLOW, "set NMODE_RUN_SLOW=1 to run the order-2000 eigenproblem")
class MunkWavenumberTest(unittest.TestCase):
    def test_munk_spot_check(self) -> None:
        modes = solve_modes(example(5))
        for m, expected in MUNK_KR.items():
            tol = 1e-7 if m <= 3 else 1e-6
            with self.subTest(m=m):
                self.assertLess(abs(modes.wavenumbers[m - 1].real - expected), tol)

    def test_invariants(self) -> None:
        SolveModesTest.assert_mode_invariants(self, solve_modes(example(5)))


if __name__ == "__main__":
    unittest.main()
