/** Payload shapes for the audit service API (schema audit-api/1). */

export const API_SCHEMA = "audit-api/1";

export type EntryStatus = "pending" | "entered" | "not_found";

export interface DrawView {
  draw_index: number;
  position: number;
  ballot_id: string;
  phantom: boolean;
  status: EntryStatus;
  container: string | null;
  container_offset: number | null;
}

export interface AssertionView {
  index: number;
  kind: "NEB" | "NEN";
  token: string;
  explanation: string;
  margin: number;
  mean: string;
  mean_value: number;
  difficulty: number | null;
  p: string;
  p_value: number;
  confirmed: boolean;
  estimated_additional: number | null;
}

export interface StatusResponse {
  schema_version: string;
  audit_id: string;
  status: "in_progress" | "confirmed" | "escalate_full_hand_count";
  contest_id: string;
  reported_winner: number;
  candidates: Record<string, string>;
  risk_limit: string;
  mode: "comparison" | "polling";
  seed: string;
  total_cards: number;
  n_records: number;
  filled_prefix: number;
  suggested_next_draw: number | null;
  draws: DrawView[];
  assertions: AssertionView[];
  discrepancies: string[];
}

export interface AuditListEntry {
  audit_id: string;
  contest_id: string;
  status: string;
}

export interface MvrPayload {
  ballot_id: string;
  ranking?: number[];
  not_found?: boolean;
}
