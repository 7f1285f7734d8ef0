import numpy as np

from bellcomm import io as bio
from bellcomm.bridge import I3322, REFERENCE_FACETS_33, chsh
from bellcomm.scenario import Scenario, vertex_matrix
from bellcomm.symmetry import reduce_to_classes


def test_vertices_roundtrip(tmp_path):
    s = Scenario(3, 2, 1)
    bio.write_vertices(tmp_path / "v.json", vertex_matrix(s), s)
    V, s2 = bio.read_vertices(tmp_path / "v.json")
    assert s2 == s and np.array_equal(V, vertex_matrix(s))


def test_inequalities_roundtrip(tmp_path):
    qs = list(REFERENCE_FACETS_33.values())
    bio.write_inequalities(tmp_path / "f.json", qs, Scenario(3, 3, 1))
    back, s = bio.read_inequalities(tmp_path / "f.json")
    assert back == qs and s == Scenario(3, 3, 1)


def test_catalog_file_as_inequalities(tmp_path):
    cat = reduce_to_classes([I3322, chsh(Scenario(3, 3))], Scenario(3, 3))
    bio.write_catalog(tmp_path / "c.json", cat)
    reps, s = bio.read_inequalities(tmp_path / "c.json")
    assert reps == cat.representatives()
    assert bio.read_catalog(tmp_path / "c.json").keys() == cat.keys()


def test_report_csv():
    text = bio.report_csv([{"class_id": 0, "L": 0, "C": 1, "Q": 0.5, "merit": 0.5,
                           "lambda": None, "schmidt1": 0.7071, "schmidt2": 0.7071}])
    lines = text.strip().splitlines()
    assert lines[0] == "class_id,L,C,Q,merit,lambda,schmidt1,schmidt2"
    assert lines[1] == "0,0,1,0.500000,0.500000,,0.707100,0.707100"


def test_pretty_blocks():
    text = bio.pretty(REFERENCE_FACETS_33[232])
    rows = text.splitlines()
    assert rows[1].split("|")[0].strip() == "-3"
    assert rows[1].split("|")[1].split() == ["2", "2", "2"]
    assert rows[2].split("|")[1].split() == ["-1", "-1", "-1"]
    assert rows[-1] == "<= 1"
    bell = bio.pretty(I3322).splitlines()
    assert bell[0].split("|")[1].split() == ["-1", "0", "0"]
