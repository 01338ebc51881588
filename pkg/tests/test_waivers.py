import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcblint.rules import Finding, Severity
from pcblint.waivers import (
    AlreadyDecided,
    DuplicateWaiver,
    NoSuchWaiver,
    Waiver,
    WaiverState,
    WaiverSyntax,
    dump_waivers,
    load_waivers,
    propose,
    reconcile,
    review,
    save_waivers,
)

P, A, R = WaiverState.PROPOSED, WaiverState.APPROVED, WaiverState.REJECTED
F = Finding("S4-off-grid", "sheet:0/instance:R1.G$1", Severity.WARNING, "off grid")


def test_empty_file():
    assert load_waivers("") == []
    assert load_waivers("# just a comment\n\n") == []


def test_one_entry():
    ws = load_waivers("S4-off-grid | sheet:0/instance:R1.G$1 | proposed | hand placed | \n")
    assert ws == [Waiver("S4-off-grid", "sheet:0/instance:R1.G$1", "hand placed")]


def test_duplicate_entry():
    line = "S4-off-grid | part:R1 | proposed | x | \n"
    with pytest.raises(DuplicateWaiver):
        load_waivers(line * 2)


@pytest.mark.parametrize("text", [
    "S4 | part:R1 | proposed\n",
    "S4 | part:R1 | maybe | x | \n",
    "S4 | part:R1 | proposed |  | \n",
    " | part:R1 | proposed | x | \n",
    "S4 | part:R1 | proposed | bad \\q escape | \n",
    "S4 | part:R1 | proposed | dangling \\",
])
def test_syntax_errors(text):
    with pytest.raises(WaiverSyntax):
        load_waivers(text)


def test_escapes_roundtrip():
    w = Waiver("F1", "part:U1", "a | b \\ c\nline two", A, "ok | fine")
    assert load_waivers(dump_waivers([w])) == [w]


text_field = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\r\x0b\x0c\x1c\x1d\x1e\x85  "),
    min_size=1,
).map(str.strip).filter(bool)


@given(st.lists(st.tuples(text_field, text_field, st.sampled_from(list(WaiverState)), text_field,
                          st.one_of(st.none(), text_field)), max_size=5,
                unique_by=lambda t: (t[0], t[1])))
def test_format_roundtrip(rows):
    ws = [Waiver(r, loc, e, s, n) for r, loc, s, e, n in rows]
    assert load_waivers(dump_waivers(ws).encode()) == ws


def test_save_is_atomic_and_lf(tmp_path):
    path = tmp_path / "waivers.txt"
    save_waivers(path, [Waiver("F1", "part:U1", "x")])
    assert b"\r" not in path.read_bytes()
    assert [p.name for p in tmp_path.iterdir()] == ["waivers.txt"]


def test_review_flow():
    ws = propose([], "F1", "part:U1", "the LED is on a header")
    ws = review(ws, "F1", "part:U1", A)
    assert ws[0].state is A
    with pytest.raises(AlreadyDecided):
        review(ws, "F1", "part:U1", R)
    rejected = review(propose([], "F1", "part:U1", "x"), "F1", "part:U1", R, "fix it instead")
    assert (rejected[0].state, rejected[0].reviewer_note) == (R, "fix it instead")
    with pytest.raises(NoSuchWaiver):
        review([], "F1", "part:U1", A)


def test_propose_after_reject_replaces():
    ws = review(propose([], "F1", "part:U1", "x"), "F1", "part:U1", R, "no")
    ws = propose(ws, "F1", "part:U1", "better reason")
    assert ws == [Waiver("F1", "part:U1", "better reason")]
    with pytest.raises(DuplicateWaiver):
        propose(ws, "F1", "part:U1", "again")


def waiver_for(f, state):
    return Waiver(f.rule_id, f.locator, "because", state)


@pytest.mark.parametrize("present", [True, False])
@pytest.mark.parametrize("state", [P, A, R])
def test_reconcile_matrix(present, state):
    findings = [F] if present else []
    r = reconcile(findings, [waiver_for(F, state)])
    expect = {
        (True, P): ((), (), (F,), 0),
        (True, A): ((), (F,), (), 0),
        (True, R): ((F,), (), (), 0),
        (False, P): ((), (), (), 1),
        (False, A): ((), (), (), 1),
        (False, R): ((), (), (), 1),
    }[(present, state)]
    assert (r.active, r.waived, r.proposed, len(r.stale)) == expect
    assert r.ready_for_review == (not r.active)


def test_reconcile_without_waivers():
    r = reconcile([F], [])
    assert r.active == (F,) and not r.ready_for_review
    assert reconcile([], []).ready_for_review


def test_non_waivable_stays_active():
    f = Finding("F3-power-short", "net:VCC", Severity.ERROR, "short", waivable=False)
    r = reconcile([f], [waiver_for(f, A)])
    assert r.active == (f,)
    assert r.stale[0].reason == "finding cannot be waived"
