import math
import os

import pytest

import xbn

ASSETS = os.path.join(os.environ.get("XBN_SOURCE_DIR", os.path.join(os.path.dirname(__file__), "..", "..")), "assets")


@pytest.fixture(scope="module")
def asia():
    return xbn.builtin_asia()


def test_network_structure(asia):
    assert asia.name == "Asia"
    assert len(asia) == 8
    assert len(asia.arcs) == 8
    assert asia.states("XRay") == ["abnormal", "normal"]
    assert asia.parents("TbOrCancer") == ["Tuberculosis", "LungCancer"]


def test_posterior(asia):
    post = xbn.posterior(asia, ["Smoker"], {"TbOrCancer": "yes"})
    assert post["Smoker"]["yes"] == pytest.approx(0.8435, abs=5e-4)
    assert xbn.posterior(asia, ["Smoker"])["Smoker"]["yes"] == 0.5


def test_mre_and_gbf(asia):
    ranking = xbn.mre(asia, {"Dyspnoea": "yes"}, k=10)
    assert len(ranking["entries"]) == 10
    assert ranking["entries"][0]["assignment"] == {"Bronchitis": "yes"}
    assert ranking["entries"][0]["score"] == pytest.approx(6.1391, abs=1e-3)
    assert xbn.gbf(asia, {"Bronchitis": "yes"}, {"Dyspnoea": "yes"}) == pytest.approx(6.1391, abs=1e-3)


def test_mpe_flips(asia):
    assert xbn.mpe(asia)["assignment"]["Bronchitis"] == "no"
    flipped = xbn.mpe(asia, {"Dyspnoea": "yes"})["assignment"]
    assert flipped["Smoker"] == "yes" and flipped["Bronchitis"] == "yes"


def test_sdp(asia):
    r = xbn.sdp(asia, {"Smoker": "yes"}, 0.55, {"TbOrCancer": "yes"}, hidden=["Tuberculosis"])
    assert r["sdp"] == pytest.approx(0.8396, abs=1e-4)
    assert xbn.sdp(asia, {"Smoker": "yes"}, 0.55, {"TbOrCancer": "yes"})["sdp"] == 1.0
    assert xbn.decide(asia, "Smoker=yes", 0.5)["decision"] == "positive"


def test_explain(asia):
    r = xbn.explain(asia, {"kind": "MutualCauses", "cause": "LungCancer=yes", "competitor": "Tuberculosis=yes"},
                    {"TbOrCancer": "yes"})
    assert r["payload"]["active"] is True
    assert "explained away" in r["narrative"]


def test_d_separation(asia):
    assert xbn.d_separated(asia, ["VisitToAsia"], ["Smoker"])
    assert not xbn.d_separated(asia, ["VisitToAsia"], ["Smoker"], ["Dyspnoea"])


def test_formats_round_trip(asia):
    assert xbn.approx_equal(xbn.parse_network(asia.to_bif()), asia, 0.0)
    assert xbn.approx_equal(xbn.parse_network(asia.to_json()), asia, 0.0)
    assert xbn.approx_equal(xbn.load_network(os.path.join(ASSETS, "asia.bif")), asia, 0.0)


def test_errors(asia):
    with pytest.raises(xbn.UsageError, match="unknown variable 'Nope'"):
        xbn.posterior(asia, ["Nope"])
    with pytest.raises(xbn.ImpossibleEvidenceError):
        xbn.mpe(asia, {"LungCancer": "yes", "TbOrCancer": "no"})
    with pytest.raises(xbn.ParseError) as info:
        xbn.parse_network("network N {\n}\nvariable A {\n  type discrete [ 2 ] { yes no };\n}\n")
    assert info.value.line == 4
    with pytest.raises(xbn.NotFoundError):
        xbn.load_network("/nonexistent.bif")
    with pytest.raises(xbn.XbnError):
        xbn.query(asia, {"operation": "frobnicate"})


def test_query_and_table(asia):
    response = xbn.query(asia, {"operation": "infer", "targets": ["Smoker"], "evidence": "TbOrCancer=yes"})
    assert response["operation"] == "infer"
    assert "0.8435" in xbn.render_table(response)
    assert math.isclose(xbn.evidence_probability(asia, "TbOrCancer=yes"), 0.064828, rel_tol=1e-12)
