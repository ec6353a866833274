import random

import pytest

from exforms import expressions as ex
from exforms.errors import InputError
from exforms.expressions import SampleBox, TolerancePolicy, parse_expr
from exforms.forms import DifferentialForm, ext_d, wedge
from exforms.pfaff import (
    FiniteTopology,
    analyze_action,
    build_cartan_topology,
    is_connected,
    limit_points,
    map_continuous,
    pfaff_sequence,
    pointwise_dimensions,
    topo_operators,
    torsion_current,
    torsion_form_coefficients,
    verify_d_is_limit_operator,
)
from util import rand_smooth_expr, sample_points

XYZ = ("x", "y", "z")
XYZT = ("x", "y", "z", "t")
BOX3 = SampleBox.cube(XYZ, count=80, seed=21)
BOX4 = SampleBox.cube(XYZT, count=80, seed=22)
POL = TolerancePolicy(1e-9, 1e-9)

F = frozenset


def one_form(variables, *texts):
    comps = [parse_expr(t, variables) for t in texts]
    return DifferentialForm.one_form(variables, comps)


def full_topology():
    seq = pfaff_sequence(one_form(XYZT, "0", "x", "0", "z"), BOX4, POL)
    return build_cartan_topology(seq)


class TestSequence:
    def test_exact_form_dimension_one(self):
        seq = pfaff_sequence(one_form(XYZ, "0", "0", "1"), BOX3, POL)
        assert seq.labels == ("A", "F")
        assert [e.nonvanishing for e in seq.elements] == [True, False]
        assert seq.dimension == 1

    def test_frobenius_dimension_two(self):
        box = SampleBox(XYZ, (0.5, -1.0, -1.0), (1.5, 1.0, 1.0), 80, 2)
        seq = pfaff_sequence(one_form(XYZ, "0", "x", "0"), box, POL)
        assert seq.dimension == 2
        assert seq.labels == ("A", "F", "H")
        assert not seq.element("H").nonvanishing

    def test_contact_dimension_three(self):
        seq = pfaff_sequence(one_form(XYZ, "0", "x", "1"), BOX3, POL)
        assert seq.dimension == 3
        assert seq.element("H").nonvanishing

    def test_symplectic_dimension_four(self):
        seq = pfaff_sequence(one_form(XYZT, "0", "x", "0", "z"), BOX4, POL)
        assert seq.dimension == 4
        K = seq.element("K").form
        assert K.coefficient((0, 1, 2, 3)).is_const(2.0)

    def test_ladder_continues_past_four_labels(self):
        v5 = ("x", "y", "z", "w", "t")
        box = SampleBox.cube(v5, count=60, seed=23)
        A = one_form(v5, "0", "x", "0", "z", "1")
        seq = pfaff_sequence(A, box, POL)
        assert seq.labels == ("A", "F", "H", "K", "L5")
        assert seq.dimension == 5

    def test_degree_requirement(self):
        with pytest.raises(Exception):
            pfaff_sequence(DifferentialForm.basis(XYZ, "x", "y"), BOX3, POL)

    def test_frobenius_pair_dimension_at_most_two(self):
        rng = random.Random(31)
        for _ in range(5):
            f = rand_smooth_expr(rng, XYZ)
            g = rand_smooth_expr(rng, XYZ)
            A = ext_d(DifferentialForm.function(XYZ, g)).scale(f)
            seq = pfaff_sequence(A, BOX3, POL)
            assert seq.dimension <= 2

    def test_pointwise_dimension_reports_excluded_points(self):
        pol = TolerancePolicy(
            1e-9, 1e-9, exclusion=parse_expr("x", XYZ), exclusion_min=0.5
        )
        seq = pfaff_sequence(one_form(XYZ, "0", "x", "1"), BOX3, pol)
        pts = pointwise_dimensions(seq, BOX3, pol)
        dims = [d for _, d in pts]
        assert None in dims                      # |x| <= 0.5 region is undefined
        assert all(d == 3 for d in dims if d is not None)


class TestTorsion:
    def test_rotation_with_axial_stretch(self):
        A = one_form(XYZT, "-y", "x", "z", "0")
        T, h = torsion_current(A)
        pts = sample_points(XYZT, 30, seed=4)
        for p in pts:
            assert all(abs(c.evaluate(p)) <= 1e-12 for c in T)
            assert h.evaluate(p) == pytest.approx(2 * p["z"])

    def test_gradient_action_has_no_torsion(self):
        phi = parse_expr("x^2*y + z*t", XYZT)
        A = ext_d(DifferentialForm.function(XYZT, phi))
        T, h = torsion_current(A)
        pts = sample_points(XYZT, 30, seed=5)
        for c in list(T) + [h]:
            assert all(abs(c.evaluate(p)) <= 1e-9 for p in pts)

    def test_scalar_potential_couples_to_magnetic_part(self):
        A = one_form(XYZT, "-y", "x", "0", "-1")    # phi = 1
        T, h = torsion_current(A)
        pts = sample_points(XYZT, 20, seed=6)
        for p in pts:
            assert T[0].evaluate(p) == pytest.approx(0.0)
            assert T[1].evaluate(p) == pytest.approx(0.0)
            assert T[2].evaluate(p) == pytest.approx(2.0)
            assert h.evaluate(p) == pytest.approx(0.0)

    def test_components_tile_the_torsion_form(self):
        rng = random.Random(41)
        pts = sample_points(XYZT, 100, seed=7)
        for _ in range(10):
            A = DifferentialForm.one_form(
                XYZT, [rand_smooth_expr(rng, XYZT) for _ in range(4)]
            )
            T, h = torsion_current(A)
            H = wedge(A, ext_d(A))
            rebuilt = torsion_form_coefficients(T, h, XYZT)
            diff = H - rebuilt
            for key, c in diff.coeffs.items():
                for p in pts:
                    assert abs(c.evaluate(p)) <= 1e-9


class TestCartanTopology:
    def test_full_carrier_has_nine_opens(self):
        t = full_topology()
        assert len(t.opens) == 9
        expected = {
            F(), F("AFHK"), F("A"), F("H"), F("AF"), F("HK"),
            F("AH"), F("AHK"), F("AFH"),
        }
        assert t.opens == expected

    def test_closeds_are_complements(self):
        t = full_topology()
        assert t.closeds == {t.carrier - o for o in t.opens}
        for name in ("F", "K", "FK"):
            assert t.is_closed(F(name))

    def test_torsion_free_carrier(self):
        seq = pfaff_sequence(one_form(XYZ, "0", "x", "0"),
                             SampleBox(XYZ, (0.5, -1, -1), (1.5, 1, 1), 60, 3), POL)
        t = build_cartan_topology(seq)
        assert t.opens == {F(), F("A"), F("AF")}
        assert t.is_connected()

    def test_empty_carrier_rejected(self):
        A = DifferentialForm.one_form(XYZ, [ex.ZERO, ex.ZERO, ex.ZERO])
        seq = pfaff_sequence(A, BOX3, POL)
        with pytest.raises(InputError):
            build_cartan_topology(seq)

    def test_limit_point_examples(self):
        t = full_topology()
        assert limit_points(t, {"A"}) == F("F")
        assert limit_points(t, {"A", "H"}) == F("FK")
        assert limit_points(t, set()) == F()

    def test_operator_examples(self):
        t = full_topology()
        interior, boundary, closure = topo_operators(t, {"F"})
        assert (interior, boundary, closure) == (F(), F("F"), F("F"))
        interior, boundary, closure = topo_operators(t, {"A", "F"})
        assert (interior, boundary, closure) == (F("AF"), F(), F("AF"))
        assert topo_operators(t, {"A", "H"})[2] == t.carrier

    def test_subset_must_lie_in_carrier(self):
        t = full_topology()
        with pytest.raises(InputError):
            limit_points(t, {"Q"})

    def test_d_is_limit_operator(self):
        t = full_topology()
        assert verify_d_is_limit_operator(t)

    def test_d_limit_on_sub_carriers(self):
        for comps in (("0", "0", "1"), ("0", "x", "0"), ("0", "x", "1")):
            seq = pfaff_sequence(one_form(XYZ, *comps), BOX3, POL)
            assert verify_d_is_limit_operator(build_cartan_topology(seq))

    def test_perturbed_d_map_fails(self):
        t = full_topology()
        bad = FiniteTopology.from_basis(
            t.carrier,
            [{"A"}, {"A", "F"}, {"H"}, {"H", "K"}],
            {"A": {"K"}, "F": set(), "H": {"K"}, "K": set()},
        )
        assert not verify_d_is_limit_operator(bad)

    def test_connectedness(self):
        assert not is_connected(full_topology())
        ab = FiniteTopology.from_basis({"A", "F"}, [{"A"}, {"A", "F"}], {"A": {"F"}})
        assert is_connected(ab)
        hk = FiniteTopology.from_basis({"H", "K"}, [{"H"}, {"H", "K"}], {"H": {"K"}})
        assert is_connected(hk)

    def test_opens_happen_to_be_intersection_closed(self):
        # not asserted by the construction; verified empirically here
        t = full_topology()
        assert (F("AF") & F("HK")) in t.opens               # the empty set
        assert (F("AFH") & F("AHK")) == F("AH")
        assert F("AH") in t.opens
        for a in t.opens:
            for b in t.opens:
                assert (a & b) in t.opens


class TestContinuity:
    def test_identity_is_continuous(self):
        t = full_topology()
        f = {p: p for p in t.carrier}
        assert map_continuous(t, t, f)

    def test_relabeling_between_two_carriers(self):
        s = full_topology()
        d = full_topology()
        assert map_continuous(s, d, {"A": "A", "F": "F", "H": "H", "K": "K"})

    def test_swapping_open_and_limit_point_breaks_continuity(self):
        t = full_topology()
        f = {"A": "F", "F": "A", "H": "H", "K": "K"}
        assert not map_continuous(t, t, f)

    def test_collapsing_limit_point_into_open_point_is_continuous(self):
        # closures only grow under this map, so closure commutation survives
        t = full_topology()
        f = {"A": "A", "F": "A", "H": "H", "K": "K"}
        assert map_continuous(t, t, f)

    def test_map_must_land_in_target(self):
        t = full_topology()
        with pytest.raises(InputError):
            map_continuous(t, t, {"A": "Q", "F": "F", "H": "H", "K": "K"})


class TestReport:
    def test_contact_form_report(self):
        report = analyze_action(one_form(XYZT, "0", "x", "1", "0"), BOX4, POL)
        assert report.dimension == 3
        assert not report.connected
        T, h = report.torsion
        pts = sample_points(XYZT, 20, seed=8)
        for p in pts:
            assert report.parity.evaluate(p) == pytest.approx(0.0)

    def test_connectedness_flips_with_torsion(self):
        frob = analyze_action(one_form(XYZT, "0", "x", "0", "0"),
                              SampleBox(XYZT, (0.5, -1, -1, -1), (1.5, 1, 1, 1), 60, 5),
                              POL)
        assert frob.dimension == 2 and frob.connected
        contact = analyze_action(one_form(XYZT, "0", "x", "1", "0"), BOX4, POL)
        assert contact.dimension == 3 and not contact.connected
