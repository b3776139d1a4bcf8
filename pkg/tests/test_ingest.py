import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jobfraud import ingest
from jobfraud.errors import CsvParseError, DataError

from conftest import make_posting


# --------------------------------------------------------------------------
# CSV reader
# --------------------------------------------------------------------------

def test_quoted_field_with_comma():
    records = ingest.parse_csv_text('a,b\nx,"y,z"\n')
    assert records == [["a", "b"], ["x", "y,z"]]


def test_doubled_quote_escape():
    records = ingest.parse_csv_text('1,"he said ""hi"""\n')
    assert records == [["1", 'he said "hi"']]


def test_embedded_newline_and_crlf():
    records = ingest.parse_csv_text('a,b\r\n"line1\nline2",2\r\n')
    assert records == [["a", "b"], ["line1\nline2", "2"]]


def test_unterminated_quote_names_record():
    with pytest.raises(CsvParseError, match="record 3"):
        ingest.parse_csv_text('a,b\n1,2\n"open,3\n')


def test_garbage_after_closing_quote():
    with pytest.raises(CsvParseError, match="record 1"):
        ingest.parse_csv_text('"abc"def,2\n')


def test_trailing_field_without_newline():
    assert ingest.parse_csv_text("a,b") == [["a", "b"]]


def test_empty_quoted_field():
    assert ingest.parse_csv_text('"",x\n') == [["", "x"]]


_field = st.text(
    alphabet=st.sampled_from(list('abc",\n\r 5é')), max_size=12
)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(_field, min_size=1, max_size=5), min_size=1, max_size=6))
def test_csv_round_trip_property(rows):
    """write -> parse is the identity on field values."""
    width = max(len(r) for r in rows)
    rows = [r + [""] * (width - len(r)) for r in rows]
    text = ingest.format_csv(rows[0], rows[1:])
    parsed = ingest.parse_csv_text(text)
    assert parsed == rows


def test_round_trip_torture_file(tmp_path):
    rows = [
        ["id", "note"],
        ["1", 'comma, "quote" and\nnewline'],
        ["2", ""],
        ["3", '""'],
        ["4", "\r\n mixed \r terminators"],
    ]
    path = tmp_path / "t.csv"
    ingest.write_csv(path, rows[0], rows[1:])
    header, data = ingest.read_csv(path)
    assert [header] + data == rows


# --------------------------------------------------------------------------
# Posting parsing
# --------------------------------------------------------------------------

def _write(tmp_path, text):
    path = tmp_path / "p.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_csv_maps_by_header_and_ignores_unknown(tmp_path):
    path = _write(
        tmp_path,
        "job_id,weird_extra,title,fraudulent\n7,zzz,Chef,1\n",
    )
    rows = ingest.parse_csv(path)
    assert rows[0].job_id == 7
    assert rows[0].title == "Chef"
    assert rows[0].fraudulent == 1
    assert rows[0].description == ""  # missing column -> empty


def test_parse_csv_bad_flag_value(tmp_path):
    path = _write(tmp_path, "job_id,fraudulent\n1,yes\n")
    with pytest.raises(DataError, match="fraudulent"):
        ingest.parse_csv(path)


def test_parse_csv_empty_flag_defaults_zero_with_warning(tmp_path, caplog):
    path = _write(tmp_path, "job_id,telecommuting,fraudulent\n1,,1\n")
    with caplog.at_level(logging.WARNING, logger="jobfraud.ingest"):
        rows = ingest.parse_csv(path)
    assert rows[0].telecommuting == 0
    assert any("telecommuting" in r.message for r in caplog.records)


def test_parse_csv_missing_file():
    with pytest.raises(DataError):
        ingest.parse_csv("/nonexistent/file.csv")


# --------------------------------------------------------------------------
# normalize_text
# --------------------------------------------------------------------------

def test_normalize_strips_tags_and_entities():
    assert ingest.normalize_text("<p>Hello&amp;World</p>") == "hello world"


def test_normalize_punctuation():
    assert (
        ingest.normalize_text("Senior Manager, Sales & Marketing")
        == "senior manager sales marketing"
    )


def test_normalize_empty():
    assert ingest.normalize_text("") == ""


def test_normalize_keeps_digits():
    assert ingest.normalize_text("401k plan!") == "401k plan"


def test_normalize_dangling_angle_bracket():
    # '<' with no closing '>' falls through to punctuation removal
    assert ingest.normalize_text("a < b") == "a b"


def test_normalize_entity_decoded_not_reparsed_as_tag():
    assert ingest.normalize_text("&lt;b&gt;bold&lt;/b&gt;") == "b bold b"


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_normalize_idempotent_and_in_language(s):
    once = ingest.normalize_text(s)
    assert ingest.normalize_text(once) == once
    if once:
        for token in once.split(" "):
            assert token and all(c.islower() or c.isdigit() for c in token)
            assert all(c in "abcdefghijklmnopqrstuvwxyz0123456789" for c in token)
    assert once == once.strip()
    assert "  " not in once


# --------------------------------------------------------------------------
# assemble_dataset
# --------------------------------------------------------------------------

def test_assemble_counts():
    rows = [make_posting(job_id=1, fraudulent=0), make_posting(job_id=2, fraudulent=1)]
    ds = ingest.assemble_dataset(rows)
    assert ds.summary == {"total": 2, "genuine": 1, "fake": 1}


def test_assemble_full_text_order_and_empty():
    row = make_posting(
        title="A B", company_profile="<b>C</b>", description="D,d",
        requirements="", benefits="E",
    )
    ds = ingest.assemble_dataset([row])
    assert ds.postings[0].full_text == "a b c d d e"
    empty = make_posting(
        title="", company_profile="", description="", requirements="", benefits="",
    )
    assert ingest.assemble_dataset([empty]).postings[0].full_text == ""


def test_assemble_preserves_order_and_count():
    rows = [make_posting(job_id=i, title=f"T{i}") for i in range(7)]
    ds = ingest.assemble_dataset(rows)
    assert [p.job_id for p in ds.postings] == list(range(7))


def test_assemble_empty_is_error():
    with pytest.raises(DataError):
        ingest.assemble_dataset([])


def test_fixture_summary_reported(fixture_dataset):
    summary = fixture_dataset.summary
    assert summary["total"] == 2000
    assert summary["genuine"] + summary["fake"] == summary["total"]
