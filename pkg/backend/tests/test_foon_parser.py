import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.core.errors import ParseError, ProfileError
from app.models.foon import FunctionalUnit, MotionNode, ObjectNode, Subgraph
from app.services.foon_parser import (
    parse_kitchen,
    parse_object_spec,
    parse_profile,
    parse_subgraph,
    read_subgraph_file,
    write_kitchen,
    write_profile,
    write_subgraph,
)
from app.services.network import merge

FIXTURE_FILES = ["stir.txt", "mashed_potato_boil.txt", "mashed_potato_microwave.txt", "tea.txt"]


def test_stir_unit_shape(fixtures_dir):
    sg = read_subgraph_file(fixtures_dir / "stir.txt")
    assert sg.name == "stir"
    assert len(sg.units) == 1
    stir = sg.units[0]
    assert stir.motion.label == "stir"
    assert len(stir.inputs) == 2
    assert len(stir.outputs) == 3


def test_leading_comment_names_the_subgraph(fixtures_dir):
    sg = parse_subgraph((fixtures_dir / "tea.txt").read_text(encoding="utf-8"))
    assert sg.name == "sweet tea"
    assert [u.motion.label for u in sg.units] == ["fill", "heat", "pour", "dip", "scoop", "stir"]


@pytest.mark.parametrize("name", FIXTURE_FILES)
def test_fixtures_are_write_fixpoints(fixtures_dir, name):
    text = (fixtures_dir / name).read_text(encoding="utf-8")
    assert write_subgraph(parse_subgraph(text)) == text


@pytest.mark.parametrize("name", FIXTURE_FILES)
def test_round_trip_is_structural(fixtures_dir, name):
    sg = parse_subgraph((fixtures_dir / name).read_text(encoding="utf-8"))
    again = parse_subgraph(write_subgraph(sg))
    assert again == sg


def test_writer_sorts_states_and_ingredients():
    node = ObjectNode(label="Tea cup", states=["stirred", "contains"], ingredients=["tea", "sugar"])
    sg = Subgraph(name="", units=[FunctionalUnit(inputs=[node], outputs=[node], motion=MotionNode(label="Stir"))])
    text = write_subgraph(sg)
    assert text == (
        "O\tTea cup\nS\tcontains\nS\tstirred\nI\tsugar\nI\ttea\n"
        "M\tStir\n"
        "O\tTea cup\nS\tcontains\nS\tstirred\nI\tsugar\nI\ttea\n"
        "//\n"
    )


words = st.text(alphabet="abcdefghij ", min_size=1, max_size=8).map(str.strip).filter(bool)
nodes = st.builds(
    ObjectNode,
    label=words,
    states=st.sets(words, max_size=3),
    ingredients=st.sets(words, max_size=2),
)
subgraphs = st.builds(
    Subgraph,
    name=st.just("generated"),
    units=st.lists(
        st.builds(
            FunctionalUnit,
            inputs=st.lists(nodes, min_size=1, max_size=3),
            outputs=st.lists(nodes, min_size=1, max_size=3),
            motion=st.builds(MotionNode, label=words),
        ),
        min_size=1,
        max_size=4,
    ),
)


@given(subgraphs)
def test_parse_write_round_trip(sg):
    text = write_subgraph(sg)
    parsed = parse_subgraph(text)
    assert parsed == sg
    assert write_subgraph(parsed) == text


def test_potato_files_remerge_to_five_units(fixtures_dir, tmp_path):
    merged = merge([read_subgraph_file(fixtures_dir / n) for n in ("mashed_potato_boil.txt", "mashed_potato_microwave.txt")])
    out = tmp_path / "universal.txt"
    out.write_text(write_subgraph(Subgraph(name="universal", units=merged.units)), encoding="utf-8")
    again = merge([read_subgraph_file(out)])
    assert [(u.id, u.signature) for u in again.units] == [(u.id, u.signature) for u in merged.units]


# error reporting


def test_empty_file():
    with pytest.raises(ParseError, match="no functional units"):
        parse_subgraph("")


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("O\tcup\n//\n", 2, "no motion line"),
        ("O\tcup\nM\tstir\n//\n", 3, "no output objects"),
        ("M\tstir\nO\tcup\n//\n", 1, "no input objects"),
        ("O\tcup\nX\twhat\n", 2, "unknown record tag"),
        ("O\tcup\nS\n", 2, "expected '<tag><TAB><value>'"),
        ("O\tcup\nS\t \n", 2, "empty value"),
        ("//\n", 1, "without a functional unit"),
        ("O\tcup\nM\tstir\nO\tcup\nM\tpour\n", 4, "second motion line"),
        ("O\tcup\nM\tstir\nO\tcup\n", 1, "not terminated"),
        ("S\thot\n", 1, "outside an object"),
    ],
)
def test_malformed_lines_carry_line_numbers(text, line, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_subgraph(text)
    assert info.value.line == line


def test_deleting_a_required_record_fails_with_a_line_number(fixtures_dir):
    lines = (fixtures_dir / "stir.txt").read_text(encoding="utf-8").splitlines()
    for i, line in enumerate(lines):
        if line.startswith("M\t") or line == "//":
            mutated = "\n".join(lines[:i] + lines[i + 1 :]) + "\n"
            with pytest.raises(ParseError) as info:
                parse_subgraph(mutated)
            assert info.value.line is not None


def test_file_errors_name_the_file(tmp_path):
    bad = tmp_path / "broken.txt"
    bad.write_text("O\tcup\nM\tstir\n//\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        read_subgraph_file(bad)
    assert str(info.value).startswith(f"{bad}:3:")


# kitchen


def test_object_spec_grammar():
    node = parse_object_spec("tea cup{contains, stirred}[tea,sugar]")
    assert node.label == "tea cup"
    assert node.states == {"contains", "stirred"}
    assert node.ingredients == {"sugar", "tea"}
    assert parse_object_spec("pot[water]").ingredients == {"water"}
    assert parse_object_spec("strainer").states == frozenset()


def test_object_spec_rejects_garbage():
    with pytest.raises(ParseError, match="malformed object"):
        parse_object_spec("cup{hot")


def test_kitchen_dedupes_and_skips_comments():
    kitchen = parse_kitchen("# kitchen\npotato{whole}\n\nPotato {whole}\npot[water]\n")
    assert len(kitchen) == 2
    assert kitchen.contains(parse_object_spec("potato{whole}"))


def test_kitchen_errors_carry_line_numbers():
    with pytest.raises(ParseError) as info:
        parse_kitchen("potato\n\ncup]{\n")
    assert info.value.line == 3


def test_kitchen_writer_is_a_fixpoint(fixtures_dir):
    for name in ("potato_kitchen.txt", "tea_kitchen.txt", "stir_kitchen.txt"):
        once = write_kitchen(parse_kitchen((fixtures_dir / name).read_text(encoding="utf-8")))
        assert write_kitchen(parse_kitchen(once)) == once


# profiles


def test_stir_profile(fixtures_dir):
    profile = parse_profile((fixtures_dir / "stir_profile.json").read_text(encoding="utf-8"))
    assert profile.name == "stir"
    assert profile.motion_rates["stir"] == 0.75
    assert profile.assistant_rate == 1.0


def test_percent_rates():
    profile = parse_profile('{"default": "90%", "motions": {"Heat": "1%"}, "units": {"4": 0.5}}')
    assert profile.default_rate == pytest.approx(0.9)
    assert profile.motion_rates == {"heat": 0.01}
    assert profile.unit_rates == {4: 0.5}


@pytest.mark.parametrize(
    "text, key",
    [
        ('{"default": 0.9, "motions": {"stir": 0.0}}', "motions.stir"),
        ('{"default": 1.5}', "default"),
        ('{"default": 0.9, "units": {"3": "120%"}}', "units.3"),
        ('{"default": 0.9, "assistant": -1}', "assistant"),
    ],
)
def test_rates_out_of_range_name_the_key(text, key):
    with pytest.raises(ProfileError, match=key.replace(".", r"\.")):
        parse_profile(text)


def test_profile_requires_default():
    with pytest.raises(ProfileError, match="default"):
        parse_profile('{"motions": {"stir": 0.75}}')


def test_profile_bad_json_reports_line():
    with pytest.raises(ProfileError) as info:
        parse_profile('{\n  "default": 0.9,\n  oops\n}')
    assert info.value.line == 3


def test_profile_round_trip(fixtures_dir):
    profile = parse_profile((fixtures_dir / "tea_profile.json").read_text(encoding="utf-8"))
    assert parse_profile(write_profile(profile)) == profile
