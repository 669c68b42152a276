/** Risk dashboard model, derived solely from the latest status payload.
 * Numbers pass through verbatim; no statistics happen in the browser. */
import { DrawView, StatusResponse } from "./types.js";

export interface AssertionRow {
  index: number;
  explanation: string;
  p: string;        // exact num/den from the server
  pValue: number;   // float convenience, also from the server
  confirmed: boolean;
  estimate: string; // display form of estimated additional draws
}

export interface Banner {
  status: StatusResponse["status"];
  label: string;
  tone: "ok" | "busy" | "alert";
}

export interface DashboardModel {
  banner: Banner;
  rows: AssertionRow[];
  pending: DrawView[];
  enteredCount: number;
  drawCount: number;
  suggestedDraws: number | null;
  discrepancies: string[];
  worstCaseApplied: boolean;
}

const BANNERS: Record<StatusResponse["status"], Banner> = {
  confirmed: { status: "confirmed", label: "Audit confirmed", tone: "ok" },
  in_progress: { status: "in_progress", label: "Audit in progress", tone: "busy" },
  escalate_full_hand_count: {
    status: "escalate_full_hand_count",
    label: "Escalated to full hand count",
    tone: "alert",
  },
};

export function deriveDashboard(status: StatusResponse): DashboardModel {
  const rows = status.assertions.map((a) => ({
    index: a.index,
    explanation: a.explanation,
    p: a.p,
    pValue: a.p_value,
    confirmed: a.confirmed,
    estimate: a.confirmed
      ? "—"
      : a.estimated_additional === null
        ? "not attainable"
        : `${a.estimated_additional}`,
  }));
  const pending: DrawView[] = [];
  const seen = new Set<string>();
  for (const d of status.draws) {
    if (d.status === "pending" && !seen.has(d.ballot_id)) {
      seen.add(d.ballot_id);
      pending.push(d);
    }
  }
  const entered = new Set(
    status.draws.filter((d) => d.status !== "pending").map((d) => d.ballot_id),
  );
  return {
    banner: BANNERS[status.status],
    rows,
    pending,
    enteredCount: entered.size,
    drawCount: status.draws.length,
    suggestedDraws: status.suggested_next_draw,
    discrepancies: status.discrepancies,
    worstCaseApplied: status.draws.some((d) => d.status === "not_found"),
  };
}

/** Candidate labels in a fixed display order for the entry picker. */
export function rosterEntries(status: StatusResponse): { id: number; label: string }[] {
  return Object.entries(status.candidates)
    .map(([id, name]) => ({ id: Number(id), label: name ? `${id} ${name}` : id }))
    .sort((a, b) => a.id - b.id);
}
