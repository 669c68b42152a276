"""Self-contained HTML report for an audit session."""
from __future__ import annotations

import html
from datetime import datetime, timezone

from .verification import export_treedoc

_STYLE = """
body { font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 70rem; color: #1b1b1b; }
h1, h2 { font-weight: 600; }
table { border-collapse: collapse; margin: 1rem 0; width: 100%; }
th, td { border: 1px solid #c8c8c8; padding: 0.35rem 0.6rem; text-align: left; font-size: 0.92rem; }
th { background: #f0f0f0; }
.ok { color: #0a6b2d; font-weight: 600; }
.warn { color: #a33; font-weight: 600; }
.muted { color: #666; }
pre { background: #f7f7f7; padding: 0.8rem; overflow-x: auto; font-size: 0.8rem; }
ul.tree, ul.tree ul { list-style: none; margin: 0 0 0 1.2rem; padding: 0; border-left: 1px dotted #bbb; }
ul.tree li { margin: 0.15rem 0; padding-left: 0.5rem; }
.pruned { color: #555; }
.unpruned { color: #a00; font-weight: 600; }
"""


def _esc(value) -> str:
    return html.escape(str(value))


def _tree_html(node, contest, aset) -> str:
    label = _esc(contest.label(node.candidate))
    if node.annotation.startswith("pruned="):
        idx = int(node.annotation.split("=", 1)[1])
        text = _esc(aset.assertions[idx].assertion.explanation())
        body = f'<span class="pruned">{label} &mdash; pruned by [{idx}] {text}</span>'
    elif node.annotation == "unpruned":
        body = f'<span class="unpruned">{label} &mdash; UNPRUNED PATH</span>'
    else:
        body = label
    children = "".join(f"<li>{_tree_html(c, contest, aset)}</li>" for c in node.children)
    if children:
        body += f"<ul>{children}</ul>"
    return body


def render_report(session) -> str:
    contest = session.contest
    aset = session.assertion_set
    engine = session.engine
    state = engine.state()
    status_class = "ok" if state.confirmed else "warn"
    generated = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M UTC")

    rows = []
    for idx, st in enumerate(state.assertions):
        p_disp = f"{float(st.p_value):.6g}"
        rows.append(
            "<tr>"
            f"<td>{idx}</td><td>{_esc(st.assertion.kind)}</td>"
            f"<td>{_esc(st.assertion.explanation())}</td>"
            f"<td>{st.margin}</td>"
            f"<td>{st.p_value.numerator}/{st.p_value.denominator} &approx; {p_disp}</td>"
            f"<td class=\"{'ok' if st.confirmed else 'warn'}\">"
            f"{'confirmed' if st.confirmed else 'open'}</td>"
            "</tr>"
        )
    assertion_table = (
        "<table><tr><th>#</th><th>Kind</th><th>Statement</th><th>Margin</th>"
        "<th>Risk (p)</th><th>Status</th></tr>" + "".join(rows) + "</table>"
    )

    sample_rows = []
    for d in state.draws:
        entry = state.entries.get(d.ballot_id)
        if entry is None:
            entry_text, cls = "pending", "muted"
        elif entry.not_found:
            entry_text, cls = "not found (worst case applied)", "warn"
        else:
            entry_text = ",".join(map(str, entry.ranking)) or "(blank)"
            cls = ""
        located = session.locate(d.position)
        where = f"{_esc(located[0])} #{located[1]}" if located else str(d.position)
        sample_rows.append(
            f"<tr><td>{d.draw_index}</td><td>{_esc(d.ballot_id)}</td><td>{where}</td>"
            f"<td class=\"{cls}\">{_esc(entry_text)}</td></tr>"
        )
    sample_table = (
        "<table><tr><th>Draw</th><th>Ballot</th><th>Location</th><th>Reading</th></tr>"
        + "".join(sample_rows) + "</table>"
    )

    if state.discrepancies:
        disc_rows = []
        for ballot_id in state.discrepancies:
            cvr = engine.cvr_by_id.get(ballot_id)
            entry = state.entries.get(ballot_id)
            cvr_text = ",".join(map(str, cvr.ranking)) if cvr else "(no record: phantom)"
            if entry is None:
                mvr_text = "pending"
            elif entry.not_found:
                mvr_text = "not found"
            else:
                mvr_text = ",".join(map(str, entry.ranking)) or "(blank)"
            disc_rows.append(f"<tr><td>{_esc(ballot_id)}</td><td>{_esc(cvr_text)}</td>"
                             f"<td>{_esc(mvr_text)}</td></tr>")
        discrepancy_table = (
            "<table><tr><th>Ballot</th><th>Electronic record</th><th>Manual reading</th></tr>"
            + "".join(disc_rows) + "</table>"
        )
    else:
        discrepancy_table = "<p class=\"ok\">No discrepancies in the entered sample.</p>"

    statuses = ["confirmed" if st.confirmed else "unconfirmed" for st in state.assertions]
    treedoc = export_treedoc(contest, aset, session.verification, assertion_status=statuses)
    trees_html = "".join(
        f"<h3>Alternative winner {_esc(contest.label(t.alt_winner))}</h3>"
        f"<ul class=\"tree\"><li>{_tree_html(t.root, contest, aset)}</li></ul>"
        for t in session.verification.trees
    )

    return f"""<!doctype html>
<html><head><meta charset="utf-8"><title>Audit report: {_esc(contest.contest_id)}</title>
<style>{_STYLE}</style></head>
<body>
<h1>Risk-limiting audit report</h1>
<p class="muted">Generated {generated} &middot; audit id {_esc(session.audit_id)}</p>
<h2>Summary</h2>
<table>
<tr><th>Contest</th><td>{_esc(contest.contest_id)}</td></tr>
<tr><th>Reported winner</th><td>{_esc(contest.label(contest.reported_winner))}</td></tr>
<tr><th>Audit mode</th><td>{_esc(engine.spec.mode)}</td></tr>
<tr><th>Risk limit</th><td>{engine.spec.risk_limit} ({float(engine.spec.risk_limit):g})</td></tr>
<tr><th>Sampling seed</th><td>{_esc(engine.spec.seed)}</td></tr>
<tr><th>Cards in frame</th><td>{engine.spec.total_cards}</td></tr>
<tr><th>Electronic records</th><td>{engine.n_records}</td></tr>
<tr><th>Ballots drawn / entered</th><td>{len(state.draws)} / {state.filled_prefix}</td></tr>
<tr><th>Status</th><td class="{status_class}">{_esc(state.status)}</td></tr>
</table>
<h2>Assertions</h2>
{assertion_table}
<h2>Discrepancies</h2>
{discrepancy_table}
<h2>Elimination trees</h2>
<p>Every elimination order electing someone other than the reported winner must be
pruned by an assertion above; a red path would mean the certificate is incomplete.</p>
{trees_html}
<h2>Sample</h2>
{sample_table}
<h2>Machine-readable tree document</h2>
<pre>{_esc(treedoc)}</pre>
</body></html>
"""
