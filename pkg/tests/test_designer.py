import pytest

from kirchberg.designer import (ANNOTATED, ENGINE, DesignError, UnsatisfiableRequest, default_catalog,
                                dump_catalog, factorize, load_catalog, parse_request, realize, tamper,
                                verify_catalog)
from kirchberg.ktheory import GradedK, model_k


def test_catalog_integrity():
    chk = verify_catalog()
    assert chk.ok
    statuses = {r["status"] for r in chk.rows}
    assert statuses == {ENGINE, ANNOTATED}


def test_tampered_engine_entry_is_caught():
    entries = default_catalog()
    entries[1] = tamper(entries[1], GradedK.parse("(Z/7, 0)"))
    chk = verify_catalog(entries)
    assert not chk.ok and "C2" in chk.failures[0]


def test_catalog_file_round_trip(tmp_path):
    f = tmp_path / "cat.json"
    f.write_text(dump_catalog(default_catalog()))
    assert [e.name for e in load_catalog(f)] == [e.name for e in default_catalog()]


def test_relaxed_entries_never_become_blocks():
    entries = default_catalog()
    combo = factorize(GradedK.parse("(Z/2, 0)"), 2, entries)
    assert all(e.usable_as_block for e in combo)
    assert not any(e.relaxed for e in combo)


@pytest.mark.parametrize("request_text,blocks", [
    ("(Z, 0)", [["Linf", "Linf"]]),
    ("(0, Z/3)", [["T3", "U1"]]),
    ("(Z/5, 0); (0, Z/3); (0, Z)", [["T5", "Linf"], ["T3", "U1"], ["Linf", "U1"]]),
])
def test_realize(request_text, blocks):
    d = realize(parse_request(request_text))
    assert d.factorization == blocks
    assert model_k(d.model, d.annotations) == d.predicted


def test_unsatisfiable_request_is_explicit():
    with pytest.raises(UnsatisfiableRequest, match="13"):
        realize(parse_request("(Z/13, 0)"))


def test_rank_three():
    d = realize(parse_request("(Z/2, 0)"), k=3)
    assert len(d.factorization[0]) == 3


def test_bad_requests():
    with pytest.raises(DesignError):
        parse_request("")
    with pytest.raises(DesignError):
        parse_request("(Z/, 0)")
