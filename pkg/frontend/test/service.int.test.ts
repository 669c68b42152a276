/** Round-trip against the real audit service: start it as a subprocess,
 * drive a replica audit through the same client/model code the browser
 * uses, and check the dashboard outcomes the auditors would see. */
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AuditApi } from "../src/api.js";
import { deriveDashboard } from "../src/dashboard.js";
import { renderBanner, renderTreeView } from "../src/render.js";
import { parseTreedoc } from "../src/treedoc.js";
import { StatusResponse } from "../src/types.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const PORT = 8940 + (process.pid % 50);
const BASE = `http://127.0.0.1:${PORT}`;

// wide-margin 4-candidate contest so a clean audit confirms in a few draws
const BALLOTS: Array<[number[], number]> = [
  [[18, 15], 60],
  [[15], 20],
  [[17], 12],
  [[16], 8],
];

function buildCvrText(): { text: string; lookup: Map<string, number[]> } {
  const lines = ["CONTEST,ui-demo,4,18", "CANDIDATES,15:Ash,16:Birch,17:Cedar,18:Davin",
                 "CARDS,100"];
  const lookup = new Map<string, number[]>();
  let i = 0;
  for (const [ranking, count] of BALLOTS) {
    for (let k = 0; k < count; k++) {
      const id = `ui-${String(i).padStart(3, "0")}`;
      lines.push([id, ...ranking].join(","));
      lookup.set(id, ranking);
      i++;
    }
  }
  return { text: lines.join("\n") + "\n", lookup };
}

let server: ChildProcess;
let api: AuditApi;
let cvrText: string;
let assertionText: string;
let lookup: Map<string, number[]>;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/audits`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 400));
  }
  throw new Error("audit service did not come up");
}

async function startAudit(): Promise<StatusResponse> {
  const response = await fetch(`${BASE}/audits`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({
      cvr_file: cvrText,
      assertion_file: assertionText,
      risk_limit: "0.05",
      mode: "comparison",
      seed: "ui-int-seed",
    }),
  });
  expect(response.status).toBe(201);
  return (await response.json()) as StatusResponse;
}

async function enterAll(
  auditId: string,
  first: StatusResponse,
  override?: { ballotId: string; notFound: boolean },
): Promise<StatusResponse> {
  let status = first;
  const entered = new Set<string>();
  for (const d of status.draws) {
    if (d.status !== "pending" || entered.has(d.ballot_id)) continue;
    entered.add(d.ballot_id);
    if (override && d.ballot_id === override.ballotId) {
      status = await api.submitMvr(auditId, { ballot_id: d.ballot_id, not_found: true });
    } else {
      status = await api.submitMvr(auditId, {
        ballot_id: d.ballot_id,
        ranking: lookup.get(d.ballot_id)!,
      });
    }
  }
  return status;
}

beforeAll(async () => {
  const workdir = mkdtempSync(join(tmpdir(), "irvaudit-ui-"));
  const built = buildCvrText();
  cvrText = built.text;
  lookup = built.lookup;
  const cvrPath = join(workdir, "ui-demo.csv");
  writeFileSync(cvrPath, cvrText);
  const assertionPath = join(workdir, "ui-demo-assertions.txt");
  execFileSync("python3", ["-m", "irvaudit.cli", "generate", cvrPath,
                           "-o", assertionPath], { cwd: REPO_ROOT });
  assertionText = readFileSync(assertionPath, "utf-8");

  server = spawn("python3", ["-m", "irvaudit.cli", "serve",
                             "--state-dir", join(workdir, "state"),
                             "--port", String(PORT)],
                 { cwd: REPO_ROOT, stdio: "ignore" });
  api = new AuditApi(BASE);
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("service round trip", () => {
  it("clean entries drive every assertion row and the banner to confirmed", async () => {
    const status = await startAudit();
    expect(status.status).toBe("in_progress");
    const final = await enterAll(status.audit_id, status);

    const model = deriveDashboard(final);
    expect(model.banner.status).toBe("confirmed");
    expect(model.rows.every((r) => r.confirmed)).toBe(true);
    expect(renderBanner(model)).toContain("Audit confirmed");
    expect(model.pending).toHaveLength(0);

    const doc = parseTreedoc(await api.getTrees(status.audit_id));
    expect(doc.assertions.every((a) => a.status === "confirmed")).toBe(true);
    const treeHtml = renderTreeView(doc);
    expect(treeHtml).toContain("pruned by");
    expect(treeHtml).not.toContain("UNPRUNED PATH");
  }, 120_000);

  it("a not-found ballot shows the worst-case warning and strictly higher risk", async () => {
    const clean = await startAudit();
    const cleanFinal = await enterAll(clean.audit_id, clean);

    const affected = await startAudit(); // same seed: identical draw sequence
    expect(affected.draws.map((d) => d.ballot_id))
      .toEqual(clean.draws.map((d) => d.ballot_id));
    const target = affected.draws.find((d) => d.status === "pending")!;
    const affectedFinal = await enterAll(affected.audit_id, affected, {
      ballotId: target.ballot_id,
      notFound: true,
    });

    const model = deriveDashboard(affectedFinal);
    expect(model.worstCaseApplied).toBe(true);
    expect(renderBanner(model)).toContain("worst case was applied");
    expect(model.discrepancies).toContain(target.ballot_id);

    const cleanPs = cleanFinal.assertions.map((a) => a.p_value);
    const affectedPs = affectedFinal.assertions.map((a) => a.p_value);
    expect(affectedPs.some((p, i) => p > cleanPs[i]!)).toBe(true);
    expect(model.banner.status).toBe("in_progress");
  }, 120_000);

  it("rejects duplicate entry with a conflict that surfaces the state", async () => {
    const status = await startAudit();
    const first = status.draws.find((d) => d.status === "pending")!;
    await api.submitMvr(status.audit_id, {
      ballot_id: first.ballot_id,
      ranking: lookup.get(first.ballot_id)!,
    });
    await expect(
      api.submitMvr(status.audit_id, { ballot_id: first.ballot_id, ranking: [] }),
    ).rejects.toMatchObject({ status: 409 });
    await expect(
      api.submitMvr(status.audit_id, { ballot_id: "ghost", ranking: [] }),
    ).rejects.toMatchObject({ status: 404 });
  }, 60_000);
});
