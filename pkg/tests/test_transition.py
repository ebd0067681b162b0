"""Tests for transition numbers, D-terms and center-manifold coefficients."""

import math

import numpy as np
import pytest

from thc_transitions.config import LC_PRESETS
from thc_transitions.errors import (
    InvalidParameters,
    NoSignChange,
    PoleAtR0,
    UnsupportedDegree,
    UnsupportedInteraction,
)
from thc_transitions.params import Params, Regime, regime, sigma_crit, threshold_rayleigh
from thc_transitions.reference_data import (
    D_TERM_TABLES,
    PR_REFERENCE,
    Q_CURVES,
    THRESHOLD_TABLES,
    TRUNCATED,
    entry_tolerance,
    printed_tolerance,
    reference_value,
)
from thc_transitions.transition import (
    PRINTED_PREFACTORS,
    Classification,
    aux_coefficients,
    center_manifold_amplitudes,
    center_manifold_coeffs,
    classify,
    critical_R_star,
    d_higher,
    d_zero_mode,
    interaction_prefactor,
    recombined_d_terms,
    sweep_row,
    transition_number,
    transition_sweep,
)

D_TERM_CASES = [
    (l_c, Le, R, label)
    for l_c, cells in D_TERM_TABLES.items()
    for (Le, R), terms in cells.items()
    for label in terms
]


def at_reference(l_c: int, Le: float, R: float) -> Params:
    return Params.at_criticality(R, Le, PR_REFERENCE, LC_PRESETS[l_c])


class TestDTerms:
    """Test D-terms against the published tables."""

    @pytest.mark.parametrize("l_c,Le,R,label", D_TERM_CASES)
    def test_table_entry(self, l_c, Le, R, label):
        """Test each D-term against its printed value or erratum."""
        report = transition_number(l_c, at_reference(l_c, Le, R))
        reference, _, _ = reference_value(l_c, Le, R, label)
        assert abs(report.d_terms[label] - reference) <= entry_tolerance(l_c, Le, R, label)

    def test_errata_replace_printed_values(self):
        """Test that the misprinted entries differ from the computed value by a factor of ten."""
        for R in (620.0, 660.0):
            report = transition_number(1, at_reference(1, 5.0, R))
            _, printed, erratum = reference_value(1, 5.0, R, "(1,1),(2,2)")
            assert erratum
            assert abs(report.d_terms["(1,1),(2,2)"] - float(printed)) > 0.05

    def test_truncated_entries(self):
        """Test that truncated entries sit within one unit above their printed value."""
        for l_c, Le, R, label in sorted(TRUNCATED):
            report = transition_number(l_c, at_reference(l_c, Le, R))
            _, printed, erratum = reference_value(l_c, Le, R, label)
            unit = 10.0 ** (-len(printed.split(".")[1]))
            assert not erratum
            assert float(printed) <= report.d_terms[label] < float(printed) + unit
            assert abs(report.d_terms[label] - float(printed)) > printed_tolerance(printed)

    def test_zero_mode_term_independent_of_lc(self):
        """Test that D_{(l_c,1),(0,2)} is the same for both presets."""
        for Le, R in [(0.1, 620.0), (0.5, 660.0)]:
            d1 = d_zero_mode(1, at_reference(1, Le, R))
            d2 = d_zero_mode(2, at_reference(2, Le, R))
            assert d1 == pytest.approx(d2, rel=1e-12)

    def test_zero_mode_term_vanishes_at_r1(self, r_lc1):
        """Test that the l = 0 term changes sign at R1."""
        sigma_c, _ = sigma_crit(r_lc1)
        _, R1 = threshold_rayleigh(0.1, PR_REFERENCE, sigma_c)
        assert d_zero_mode(1, Params.at_criticality(R1, 0.1, PR_REFERENCE, r_lc1)) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_zero_mode_sign_chart(self):
        """Test sign(D02) = -sign(R - R1) for Le < 1 and +1 for Le > 1 across the K > 0 region."""
        rng = np.random.default_rng(17)
        r = LC_PRESETS[1]
        sigma_c, _ = sigma_crit(r)
        checked = 0
        for _ in range(300):
            Le = rng.uniform(0.02, 0.95) if rng.random() < 0.5 else rng.uniform(1.05, 5.0)
            Pr = rng.uniform(1.0, 20.0)
            R0, R1 = threshold_rayleigh(Le, Pr, sigma_c)
            R = rng.uniform(0.5 * sigma_c, R0 if Le < 1 else 3.0 * sigma_c)
            params = Params.at_criticality(R, Le, Pr, r)
            if regime(params).regime is not Regime.STEADY:
                continue
            if abs(R - R1) < 1e-6 * abs(R1) or abs(R - R0) < 1e-6 * abs(R0):
                continue
            expected = -np.sign(R - R1) if Le < 1 else 1.0
            assert np.sign(d_zero_mode(1, params)) == expected
            checked += 1
        assert checked > 100

    @pytest.mark.parametrize("l_c", [1, 2])
    def test_zero_mode_dominates_on_table_grid(self, l_c):
        """Test |D02| above the sum of the higher-mode terms at every tabulated point."""
        for Le, R in D_TERM_TABLES[l_c]:
            report = transition_number(l_c, at_reference(l_c, Le, R))
            zero = abs(report.d_terms[f"({l_c},1),(0,2)"])
            higher = sum(
                abs(value) for label, value in report.d_terms.items()
                if label != f"({l_c},1),(0,2)"
            )
            assert zero > higher

    def test_interaction_prefactor(self):
        """Test the corrected angular prefactor and its difference from the printed one."""
        assert interaction_prefactor(1, 2) == pytest.approx(-3 * math.pi / 80)
        assert interaction_prefactor(1, 2) != pytest.approx(PRINTED_PREFACTORS[(1, 2)])
        with pytest.raises(UnsupportedInteraction):
            interaction_prefactor(1, 4)

    def test_d_higher_matches_report(self, type_i_params):
        """Test that d_higher reproduces the term inside the transition report."""
        report = transition_number(1, type_i_params)
        assert d_higher(1, 2, type_i_params) == pytest.approx(
            report.d_terms["(1,1),(2,2)"], rel=1e-14
        )
        assert report.imag_residue <= 1e-9 * abs(report.q)


class TestTransitionNumber:
    """Test q_{l_c}, its classification and its error paths."""

    @pytest.mark.parametrize("key", sorted(Q_CURVES))
    def test_curve_points(self, key):
        """Test q(R) at every fifth published curve point."""
        l_c, Le = key
        for R, expected in Q_CURVES[key][::5]:
            q = transition_number(l_c, at_reference(l_c, Le, float(R))).q
            assert abs(q - expected) <= printed_tolerance(repr(expected), rtol=1e-3)

    def test_classification(self, type_i_params, type_ii_params):
        """Test Type-I below R* and Type-II above it."""
        assert transition_number(1, type_i_params).classification is Classification.TYPE_I
        assert transition_number(1, type_ii_params).classification is Classification.TYPE_II
        assert classify(0.0) is Classification.MARGINAL

    def test_attractor_radius_above_criticality(self, type_i_params):
        """Test that beta/q is reported only above sigma_c."""
        assert transition_number(1, type_i_params).attractor_radius_sq is None
        sigma_c, _ = sigma_crit(type_i_params.r)
        report = transition_number(1, type_i_params.with_sigma(sigma_c * 1.001))
        assert report.beta_critical > 0
        assert report.attractor_radius_sq == pytest.approx(report.beta_critical / report.q)

    def test_attractor_radius_vanishes_at_criticality(self, type_i_params):
        """Test that beta/q shrinks linearly with sigma - sigma_c."""
        sigma_c, _ = sigma_crit(type_i_params.r)
        radii = []
        for offset in (1e-4, 1e-5, 1e-6):
            report = transition_number(1, type_i_params.with_sigma(sigma_c * (1 + offset)))
            assert report.classification is Classification.TYPE_I
            assert report.attractor_radius_sq > 0
            radii.append(report.attractor_radius_sq)
        assert radii[1] / radii[0] == pytest.approx(0.1, rel=1e-2)
        assert radii[2] / radii[1] == pytest.approx(0.1, rel=1e-2)

    def test_rejects_unsupported_degree(self):
        """Test that l_c = 3 has no closed form."""
        params = Params.at_criticality(620.0, 0.1, 7.5, 1.5)
        assert params.l_c == 3
        with pytest.raises(UnsupportedDegree):
            transition_number(3, params)

    def test_rejects_wrong_aspect_ratio(self, type_i_params):
        """Test that l_c must match the aspect ratio."""
        with pytest.raises(InvalidParameters):
            transition_number(2, type_i_params)

    def test_rejects_oscillatory_regime(self, oscillatory_params):
        """Test that K < 0 parameters are rejected."""
        with pytest.raises(InvalidParameters):
            transition_number(1, oscillatory_params)

    def test_pole_at_r0(self, r_lc1):
        """Test that R = R0 is rejected."""
        sigma_c, _ = sigma_crit(r_lc1)
        R0, _ = threshold_rayleigh(0.1, PR_REFERENCE, sigma_c)
        with pytest.raises(PoleAtR0):
            transition_number(1, Params.at_criticality(R0, 0.1, PR_REFERENCE, r_lc1))

    def test_near_pole_flag(self, r_lc1):
        """Test that points just inside the warning band are flagged."""
        sigma_c, _ = sigma_crit(r_lc1)
        R0, _ = threshold_rayleigh(0.1, PR_REFERENCE, sigma_c)
        report = transition_number(1, Params.at_criticality(R0 * (1 - 1e-6), 0.1, PR_REFERENCE, r_lc1))
        assert report.near_pole


class TestCriticalRStar:
    """Test the sign change of q along the critical line."""

    @pytest.mark.parametrize("l_c", [1, 2])
    @pytest.mark.parametrize("Le", [0.01, 0.1, 0.5])
    def test_threshold_tables(self, l_c, Le):
        """Test R* against the threshold tables."""
        expected, _ = THRESHOLD_TABLES[l_c][Le]
        assert critical_R_star(l_c, Le, PR_REFERENCE, LC_PRESETS[l_c]) == pytest.approx(
            expected, abs=1e-2
        )

    def test_no_sign_change_above_unit_lewis(self):
        """Test that Le > 1 has no sign change."""
        with pytest.raises(NoSignChange):
            critical_R_star(1, 5.0, PR_REFERENCE, LC_PRESETS[1])

    @pytest.mark.parametrize("l_c", [1, 2])
    def test_zero_rtilde_limit_is_continuous(self, l_c):
        """Test q at the lower bracket end R = sigma_c against a point just above it."""
        r = LC_PRESETS[l_c]
        sigma_c, _ = sigma_crit(r)
        at_edge = Params.at_criticality(sigma_c, 0.5, PR_REFERENCE, r)
        assert at_edge.Rtilde == 0.0
        q_edge = transition_number(l_c, at_edge).q
        q_inside = transition_number(
            l_c, Params.at_criticality(sigma_c * (1 + 1e-9), 0.5, PR_REFERENCE, r)
        ).q
        assert math.isfinite(q_edge)
        assert q_edge > 0
        assert q_edge == pytest.approx(q_inside, rel=1e-6)

    def test_salinity_branch_drops_out_at_zero_rtilde(self, r_lc2):
        """Test that the branch with beta = -Le s carries no weight when Rtilde = 0."""
        sigma_c, _ = sigma_crit(r_lc2)
        aux = aux_coefficients(2, Params.at_criticality(sigma_c, 0.5, PR_REFERENCE, r_lc2))
        for l in aux.degrees:
            inverse = aux.branch_inverse(l)
            assert all(math.isfinite(abs(c)) for c in aux.c[l])
            salinity = [k for k, a in enumerate(aux.a[l]) if abs(a) < 1e-6]
            assert len(salinity) == 1
            assert abs(inverse[salinity[0]]) < 1e-9


class TestCenterManifold:
    """Test center-manifold coefficients and the recombined D-terms."""

    @pytest.mark.parametrize("l_c", [1, 2])
    def test_recombination_matches_closed_form(self, l_c):
        """Test D-terms rebuilt from A02, A22, B22, B42 against the direct formulas."""
        params = at_reference(l_c, 0.5, 620.0)
        report = transition_number(l_c, params)
        rebuilt = recombined_d_terms(l_c, params)
        assert set(rebuilt) == set(report.d_terms)
        for label, value in report.d_terms.items():
            assert rebuilt[label] == pytest.approx(value, rel=1e-8)

    def test_coefficient_shapes(self, type_i_params):
        """Test which coefficients exist for l_c = 1."""
        cm = center_manifold_coeffs(1, type_i_params)
        assert len(cm.A22) == 3
        assert cm.a02[0] == pytest.approx(1 / 96, rel=1e-12)
        with pytest.raises(AttributeError):
            cm.B42

    def test_amplitudes_keyed_by_mode(self, type_i_params):
        """Test the (l, mu, k) keys of the center-manifold amplitudes."""
        import numpy as np

        cm = center_manifold_coeffs(1, type_i_params)
        amplitudes = center_manifold_amplitudes(cm, np.array([0.1 - 0.2j, 0.3, -0.1 - 0.2j]))
        assert (0, 0, 1) in amplitudes and (0, 0, 2) in amplitudes
        assert {key for key in amplitudes if key[0] == 2} == {
            (2, mu, k) for mu in range(-2, 3) for k in (1, 2, 3)
        }
        with pytest.raises(InvalidParameters):
            center_manifold_amplitudes(cm, np.zeros(5))


class TestSweepRows:
    """Test sweep rows and the pole guard."""

    def test_sweep_in_input_order(self, r_lc1):
        """Test that a sweep keeps its input order and columns."""
        df = transition_sweep(1, 0.1, PR_REFERENCE, r_lc1, [660.0, 620.0, 640.0])
        assert list(df["R"]) == [660.0, 620.0, 640.0]
        assert list(df.columns) == [
            "R", "q", "D(1,1),(0,2)", "D(1,1),(2,2)", "classification", "near_pole", "pole_guard"
        ]

    def test_pole_guard_row(self, r_lc1):
        """Test that the row at R0 carries NaN and the guard flag."""
        sigma_c, _ = sigma_crit(r_lc1)
        R0, _ = threshold_rayleigh(0.1, PR_REFERENCE, sigma_c)
        row = sweep_row(1, 0.1, PR_REFERENCE, r_lc1, R0)
        assert row.pole_guard
        assert math.isnan(row.q)
