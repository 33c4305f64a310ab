import gzip

import pytest

from latsim.errors import DataError
from latsim.lanl import LanlIngestConfig, ingest_lanl_auth, iter_lines

FIXTURE = [
    "1,U1@DOM1,U1@DOM1,C1,C2,NTLM,Network,LogOn,Success",
    "2,U2@DOM1,U2@DOM1,C2,C3,Kerberos,Network,LogOn,Success",
    "3,U3@DOM1,U3@DOM1,C1,C2,NTLM,Network,LogOn,Success",
]


def test_three_line_fixture_with_duplicate():
    g, report = ingest_lanl_auth(FIXTURE)
    assert (g.n, g.m) == (3, 2)
    assert report.events_used == 3
    assert report.malformed == 0


def test_field_extraction_to_edge():
    g, _ = ingest_lanl_auth(["1,U1@D1,U1@D1,C1,C2,NTLM,Network,LogOn,Success"])
    assert g.labels == ("C1", "C2")
    assert list(g.successors(0)) == [1]


def test_self_loop_event_makes_no_edge():
    lines = FIXTURE + ["4,U,U,C9,C9,NTLM,Network,LogOn,Success"]
    g, report = ingest_lanl_auth(lines)
    assert report.self_loops == 1
    assert "C9" not in g.labels


def test_only_self_loops_is_empty():
    with pytest.raises(DataError, match="empty authentication log"):
        ingest_lanl_auth(["1,U,U,C1,C1,NTLM,Network,LogOn,Success"])


def test_failure_events_excluded_by_default():
    lines = FIXTURE + ["9,U,U,C3,C1,NTLM,Network,LogOn,Fail"]
    g, report = ingest_lanl_auth(lines)
    assert report.filtered_outcome == 1
    assert g.m == 2
    g2, _ = ingest_lanl_auth(lines, LanlIngestConfig(include_failures=True))
    assert g2.m == 3


def test_malformed_lines_skipped_with_counter():
    lines = FIXTURE * 4 + ["not,a,valid,line"]
    g, report = ingest_lanl_auth(lines)
    assert report.malformed == 1
    assert g.m == 2


def test_malformed_over_10_percent_is_hard_error():
    lines = FIXTURE + ["garbage"] * 2
    with pytest.raises(DataError, match="malformed"):
        ingest_lanl_auth(lines)


def test_non_integer_time_is_malformed():
    lines = FIXTURE * 4 + ["soon,U,U,C5,C6,NTLM,Network,LogOn,Success"]
    _, report = ingest_lanl_auth(lines)
    assert report.malformed == 1


def test_window_excludes_late_events():
    limit = 30 * 86400
    lines = [
        f"{limit - 1},U,U,A,B,N,N,L,Success",
        f"{limit},U,U,A,C,N,N,L,Success",
    ]
    g, report = ingest_lanl_auth(lines)
    assert g.m == 1
    assert report.out_of_window == 1


def test_no_window_keeps_everything():
    lines = [f"{t},U,U,A,B{t},N,N,L,Success" for t in (1, 10**7, 10**9)]
    g, _ = ingest_lanl_auth(lines, LanlIngestConfig(window_days=None))
    assert g.m == 3


def test_early_stop_on_sorted_tail():
    limit = 30 * 86400
    lines = [f"{1},U,U,A,B,N,N,L,Success"]
    lines += [f"{limit + i},U,U,A,C{i},N,N,L,Success" for i in range(1500)]
    g, report = ingest_lanl_auth(lines)
    assert report.stopped_early
    assert report.lines_total < len(lines)
    assert g.m == 1


def test_gzip_detected_by_magic_bytes(tmp_path):
    path = tmp_path / "auth.txt.gz"
    with gzip.open(path, "wt") as fh:
        fh.write("\n".join(FIXTURE) + "\n")
    g, _ = ingest_lanl_auth(iter_lines(path))
    assert (g.n, g.m) == (3, 2)


def test_plain_text_file(tmp_path):
    path = tmp_path / "auth.txt"
    path.write_text("\n".join(FIXTURE) + "\n")
    g, _ = ingest_lanl_auth(iter_lines(path))
    assert (g.n, g.m) == (3, 2)
