import { describe, expect, it } from "vitest";

import { deriveDashboard, rosterEntries } from "../src/dashboard.js";
import {
  renderAssertionRows,
  renderBanner,
  renderPendingList,
  renderTreeView,
} from "../src/render.js";
import { parseTreedoc } from "../src/treedoc.js";
import { StatusResponse } from "../src/types.js";

function status(overrides: Partial<StatusResponse> = {}): StatusResponse {
  return {
    schema_version: "audit-api/1",
    audit_id: "abc123",
    status: "in_progress",
    contest_id: "da-replica",
    reported_winner: 18,
    candidates: { "15": "Ash", "16": "Birch", "17": "", "18": "Davin" },
    risk_limit: "1/20",
    mode: "comparison",
    seed: "dice",
    total_cards: 190,
    n_records: 190,
    filled_prefix: 1,
    suggested_next_draw: 17,
    draws: [
      { draw_index: 1, position: 3, ballot_id: "b3", phantom: false,
        status: "entered", container: null, container_offset: null },
      { draw_index: 2, position: 9, ballot_id: "b9", phantom: false,
        status: "pending", container: "Box A", container_offset: 4 },
      { draw_index: 3, position: 9, ballot_id: "b9", phantom: false,
        status: "pending", container: "Box A", container_offset: 4 },
    ],
    assertions: [
      { index: 0, kind: "NEB", token: "NEB,16,18", margin: 45,
        explanation: "Candidate 18 cannot be eliminated before 16.",
        mean: "47/76", mean_value: 0.618, difficulty: 24,
        p: "217/256", p_value: 0.84765625, confirmed: false,
        estimated_additional: 22 },
      { index: 1, kind: "NEN", token: "NEN,18,15,{16,17}", margin: 4,
        explanation: "Candidate 18 cannot be eliminated next when {16, 17} are eliminated.",
        mean: "97/190", mean_value: 0.5105, difficulty: 284,
        p: "1/32", p_value: 0.03125, confirmed: true,
        estimated_additional: 0 },
    ],
    discrepancies: [],
    ...overrides,
  };
}

describe("deriveDashboard", () => {
  it("derives rows verbatim from the payload", () => {
    const model = deriveDashboard(status());
    expect(model.banner.status).toBe("in_progress");
    expect(model.rows).toHaveLength(2);
    expect(model.rows[0]!.p).toBe("217/256"); // exact string passed through
    expect(model.rows[0]!.pValue).toBe(0.84765625);
    expect(model.rows[0]!.estimate).toBe("22");
    expect(model.rows[1]!.confirmed).toBe(true);
    expect(model.rows[1]!.estimate).toBe("—");
    expect(model.suggestedDraws).toBe(17);
  });

  it("dedupes repeated pending draws of the same ballot", () => {
    const model = deriveDashboard(status());
    expect(model.pending.map((d) => d.ballot_id)).toEqual(["b9"]);
    expect(model.enteredCount).toBe(1);
    expect(model.drawCount).toBe(3);
  });

  it("flags worst-case application when any ballot is not found", () => {
    const s = status();
    s.draws[1]!.status = "not_found";
    s.discrepancies = ["b9"];
    const model = deriveDashboard(s);
    expect(model.worstCaseApplied).toBe(true);
    expect(renderBanner(model)).toContain("worst case was applied");
  });

  it("maps statuses to banners", () => {
    expect(deriveDashboard(status({ status: "confirmed" })).banner.tone).toBe("ok");
    expect(
      deriveDashboard(status({ status: "escalate_full_hand_count" })).banner.tone,
    ).toBe("alert");
  });

  it("orders the roster for the picker", () => {
    expect(rosterEntries(status())).toEqual([
      { id: 15, label: "15 Ash" },
      { id: 16, label: "16 Birch" },
      { id: 17, label: "17" },
      { id: 18, label: "18 Davin" },
    ]);
  });
});

describe("renderers", () => {
  it("renders assertion rows with confirmation badges", () => {
    const html = renderAssertionRows(deriveDashboard(status()));
    expect(html).toContain("cannot be eliminated before 16");
    expect(html).toContain("confirmed");
    expect(html).toContain("open");
    expect(html).toContain("0.03125");
  });

  it("escapes hostile payload text", () => {
    const s = status();
    s.assertions[0]!.explanation = '<script>alert("x")</script>';
    const html = renderAssertionRows(deriveDashboard(s));
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });

  it("renders pending list with locations and phantom badges", () => {
    const s = status();
    s.draws[1]!.phantom = true;
    const html = renderPendingList(deriveDashboard(s).pending, "b9");
    expect(html).toContain("Box A #4");
    expect(html).toContain("phantom");
    expect(html).toContain('class="selected"');
  });

  it("collapses pruned subtrees and flags unpruned paths end to end", () => {
    const doc = parseTreedoc(
      "TREEDOC,1\nCONTEST,t\nWINNER,1\n" +
        "ASSERTION,0,confirmed,NEB,2,1\nEXPLAIN,0,Candidate 1 beats 2.\n" +
        "TREE,2\nNODE,0,2,unpruned\nNODE,1,0,pruned=0\nNODE,1,1,unpruned\n",
    );
    const html = renderTreeView(doc);
    expect(html).toContain("pruned by [0]");
    expect(html).toContain("Candidate 1 beats 2.");
    const unprunedMarks = html.match(/UNPRUNED PATH/g) ?? [];
    expect(unprunedMarks.length).toBe(2); // root and leaf both flagged
  });
});
