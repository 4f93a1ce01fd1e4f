import numpy as np
import pytest

from conftest import c_matrix, guillemin_structure, polytope
from torickgk.compactify import ProbeSettings, acgtf_check, check_c1_c2, check_c3, kahler_reference
from torickgk.errors import PolytopeError, RequiresC1C2
from torickgk.gk_core import GKStructure
from torickgk.oracle import almost_kahler_factor
from torickgk.potential import Expression, Guillemin, Sum


@pytest.mark.parametrize("name", ["square", "simplex", "hirzebruch"])
@pytest.mark.parametrize("c", [0.3, 5.0])
def test_constant_C_extends(name, c):
    ref = guillemin_structure(name)
    rep = check_c1_c2(ref, ref.with_C(c_matrix(c)))
    assert rep.verdict
    assert not rep.witnesses


def test_reference_against_itself():
    ref = guillemin_structure("square")
    assert check_c1_c2(ref, ref).verdict
    rep = check_c3(ref, ref)
    assert rep.verdict


def test_doubled_potential_fails_c1_with_witness():
    P = polytope("square")
    rep = check_c1_c2(kahler_reference(P), GKStructure(P, Guillemin(P, 2.0), c_matrix(0.3)))
    assert not rep.verdict
    assert rep.witnesses[0]["condition"] == "C1"


def test_log_perturbation_fails():
    P = polytope("simplex")
    G = GKStructure.kahler(P, Sum((Guillemin(P), Expression.from_source("0.5*mu1*log(mu1)", 2))))
    assert not check_c1_c2(kahler_reference(P), G).verdict


def test_different_polytopes_rejected():
    with pytest.raises(PolytopeError):
        check_c1_c2(guillemin_structure("square"), guillemin_structure("rectangle"))


def test_c3_requires_c1_c2():
    P = polytope("square")
    with pytest.raises(RequiresC1C2):
        check_c3(kahler_reference(P), GKStructure.kahler(P, Guillemin(P, 2.0)))


def test_c3_implied_in_dimension_four():
    ref = guillemin_structure("hirzebruch")
    rep = check_c3(ref, ref.with_C(c_matrix(1.0)))
    assert rep.verdict
    assert rep.conditions["C3"]["implied_in_dimension_four"]
    assert rep.conditions["C3"]["smallest_relative_eigenvalue"] > 0


def test_c3_engineered_failure_in_dimension_six():
    P = polytope("cube")
    C = np.zeros((3, 3))
    C[1, 2], C[2, 1] = 0.5, -0.5
    ref = kahler_reference(P)
    test = GKStructure(P, Sum((Guillemin(P), Expression.from_source("-(1-mu1)*(mu2-0.5)^2", 3))), C)
    c12 = check_c1_c2(ref, test)
    assert c12.verdict
    rep = check_c3(ref, test, c12)
    assert not rep.verdict
    assert rep.witnesses[0]["condition"] == "C3"
    assert check_c3(ref, ref.with_C(C)).verdict


def test_tol_scale_loosens():
    st = ProbeSettings(tol_scale=10.0)
    assert st.scaled("rtol") == pytest.approx(1e-5)
    assert st.scaled("det_floor") == pytest.approx(1e-7)


# ------------------------------------------------------------------ ACGTF

@pytest.mark.parametrize("name", ["square", "simplex", "hirzebruch", "rectangle"])
def test_acgtf_guillemin(name):
    rep = acgtf_check(guillemin_structure(name))
    assert rep.verdict
    assert rep.conditions["normal_slope"]["min_slope"] == pytest.approx(2.0, abs=1e-3)
    assert rep.conditions["normal_slope"]["max_slope"] == pytest.approx(2.0, abs=1e-3)


def test_acgtf_hirzebruch_covers_all_faces():
    P = polytope("hirzebruch")
    assert len([f for f in P.faces if f]) == 8  # four facets and four vertices
    assert acgtf_check(guillemin_structure("hirzebruch")).verdict


def test_acgtf_doubled_potential_slope_one():
    P = polytope("square")
    rep = acgtf_check(GKStructure.kahler(P, Guillemin(P, 2.0)))
    assert not rep.verdict
    assert rep.conditions["normal_slope"]["max_slope"] == pytest.approx(1.0, abs=1e-3)


def test_acgtf_of_almost_kahler_metric():
    G = guillemin_structure("hirzebruch", c_matrix(1.0))
    assert acgtf_check(G, almost_kahler_factor).verdict


def test_acgtf_selected_faces():
    rep = acgtf_check(guillemin_structure("cube"), faces=[{0}, {0, 1, 2}])
    assert rep.verdict
