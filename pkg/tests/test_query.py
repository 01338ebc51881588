import pytest

from pcblint.eagle import parse_board, parse_library
from pcblint.query import KindMismatch, From, glob_match, select

TWO_PACKAGES = """<eagle version="9.6.2"><drawing><library><packages>
<package name="A"><text x="0" y="0" size="1" layer="25">&gt;NAME</text>
<text x="0" y="0" size="1" layer="25">U1</text></package>
<package name="B"><text x="0" y="0" size="1" layer="25">&gt;NAME</text>
<text x="0" y="0" size="1" layer="27">&gt;VALUE</text></package>
</packages><symbols/><devicesets/></library></drawing></eagle>"""


@pytest.fixture
def lib():
    return parse_library(TWO_PACKAGES)


def test_from_document(blinky_sch):
    assert From(blinky_sch).count() == 1
    assert select is From


def test_sheets(blinky_sch):
    assert From(blinky_sch).sheets().count() == len(blinky_sch.sheets)


def test_package_texts(lib):
    assert From(lib).packages().texts().count() == 4


def test_literal_tnames(lib):
    assert From(lib).packages().texts().with_layer(25).without_text(">NAME").count() == 1
    assert From(lib).packages().texts().with_layer("tNames").without_text(">NAME").count() == 1
    clean = From(lib).packages().with_name("B").texts()
    assert clean.with_layer(25).without_text(">NAME").count() == 0


def test_parts(blinky_sch):
    assert From(blinky_sch).parts().count() == 5
    assert [p.name for p in From(blinky_sch).parts().collect()] == ["U1", "R1", "R2", "D1", "C1"]
    resistors = From(blinky_sch).parts().with_deviceset("RESISTOR*")
    assert [p.name for p in resistors.collect()] == ["R1", "R2"]
    assert From(blinky_sch).parts().with_value("1?k").first().name == "R2"


def test_texts_off_document_is_kind_mismatch(blinky_sch):
    with pytest.raises(KindMismatch):
        From(blinky_sch).texts()
    with pytest.raises(KindMismatch):
        From(blinky_sch).parts().with_layer(25)


def test_empty_board_elements():
    brd = parse_board(b"<eagle><drawing><board><plain/><libraries/><elements/><signals/>"
                      b"</board></drawing></eagle>")
    assert From(brd).elements().count() == 0


def test_empty_selection(blinky_sch):
    empty = From(blinky_sch).parts().with_name("NOPE")
    assert empty.count() == 0
    assert empty.first() is None
    assert empty.collect() == []


def test_board_navigation(blinky_brd):
    assert From(blinky_brd).elements().with_name("R*").count() == 2
    assert From(blinky_brd).signals().with_name("GND").count() == 1
    assert From(blinky_brd).packages().count() == 4


def test_pins_and_nets(blinky_sch):
    pins = From(blinky_sch).parts().with_name("U1").pins().collect()
    assert {p.pin for p in pins} == {"PB5", "RESET", "VCC", "GND", "NC"}
    nets = From(blinky_sch).sheets().nets().with_name("N$*")
    assert nets.count() == 2
    assert From(blinky_sch).sheets().nets().with_name("GND").pins().count() == 3


def test_selection_is_immutable(blinky_sch):
    parts = From(blinky_sch).parts()
    parts.with_name("R*")
    assert parts.count() == 5


def test_aliases(blinky_sch):
    assert From(blinky_sch).get_sheets().count() == 1
    assert From(blinky_sch).get_sheets().get_text().count() == 1


@pytest.mark.parametrize("pattern,text,ok", [
    ("*", "", True), ("*", None, True), ("R*", "R1", True), ("r*", "R1", False),
    ("R?", "R10", False), ("R??", "R10", True), ("N$1", "N$1", True), ("[a]", "a", False),
    ("a.b", "axb", False),
])
def test_glob(pattern, text, ok):
    assert glob_match(pattern, text) is ok
