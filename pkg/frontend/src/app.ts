/** DOM wiring: everything on screen derives from the latest API payloads,
 * so a reload loses nothing but the in-flight form. */
import { ApiError, AuditApi } from "./api.js";
import { deriveDashboard, rosterEntries } from "./dashboard.js";
import { EntryForm } from "./form.js";
import {
  esc,
  renderAssertionRows,
  renderBanner,
  renderErrorPanel,
  renderPendingList,
  renderProgress,
  renderTreeView,
} from "./render.js";
import { parseTreedoc } from "./treedoc.js";
import { StatusResponse } from "./types.js";

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
};

class App {
  private api = new AuditApi(window.location.origin);
  private auditId: string | null = null;
  private status: StatusResponse | null = null;
  private form: EntryForm | null = null;
  private lastComparison: string | null = null;

  async start(): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    this.auditId = params.get("audit");
    if (!this.auditId) {
      await this.renderAuditPicker();
      return;
    }
    await this.refresh();
    document.addEventListener("keydown", (e) => this.onKey(e));
  }

  private async renderAuditPicker(): Promise<void> {
    try {
      const audits = await this.api.listAudits();
      const items = audits
        .map(
          (a) =>
            `<li><a href="?audit=${esc(a.audit_id)}">${esc(a.audit_id)}</a> ` +
            `${esc(a.contest_id)} <span class="muted">${esc(a.status)}</span></li>`,
        )
        .join("");
      $("main").innerHTML =
        "<h2>Open audits</h2>" +
        (items ? `<ul class="pending">${items}</ul>` : "<p>No audit sessions yet. Start one with the CLI.</p>");
    } catch (err) {
      this.showError(err);
    }
  }

  private async refresh(): Promise<void> {
    if (!this.auditId) return;
    try {
      this.status = await this.api.getStatus(this.auditId);
      this.renderAll();
      await this.renderTrees();
    } catch (err) {
      this.showError(err);
    }
  }

  private showError(err: unknown): void {
    const message = err instanceof Error ? err.message : String(err);
    $("banner").innerHTML = renderErrorPanel(message);
  }

  private renderAll(): void {
    if (!this.status) return;
    const model = deriveDashboard(this.status);
    $("banner").innerHTML = renderBanner(model);
    $("assertions").innerHTML = renderAssertionRows(model);
    $("progress").innerHTML = renderProgress(model);
    $("pending").innerHTML = renderPendingList(
      model.pending,
      this.form ? this.form.ballotId : null,
    );
    $("comparison").innerHTML = this.lastComparison ?? "";
    const report = $("report-link") as HTMLAnchorElement;
    report.href = this.api.reportUrl(this.status.audit_id);
    this.renderForm();
    for (const button of $("pending").querySelectorAll("button[data-ballot]")) {
      button.addEventListener("click", () => {
        this.openForm((button as HTMLElement).dataset.ballot!);
      });
    }
    const drawButton = $("draw-more") as HTMLButtonElement;
    drawButton.disabled = model.banner.status !== "in_progress";
    drawButton.onclick = () => void this.drawMore();
    const escalateButton = $("escalate") as HTMLButtonElement;
    escalateButton.disabled = model.banner.status === "escalate_full_hand_count";
    escalateButton.onclick = () => void this.escalate();
  }

  private openForm(ballotId: string): void {
    if (!this.status) return;
    this.form = new EntryForm(
      ballotId,
      rosterEntries(this.status).map((r) => r.id),
    );
    this.lastComparison = null;
    this.renderAll();
  }

  private renderForm(): void {
    const host = $("entry");
    if (!this.form || !this.status) {
      host.innerHTML = '<p class="muted">Pick a pending ballot to enter it.</p>';
      return;
    }
    const form = this.form;
    const roster = rosterEntries(this.status);
    const chosen = form.currentRanking
      .map(
        (c, i) =>
          `<li><span>${i + 1}. ${esc(roster.find((r) => r.id === c)?.label ?? c)}</span>` +
          `<button data-move="${i},-1" title="move up">&uarr;</button>` +
          `<button data-move="${i},1" title="move down">&darr;</button>` +
          `<button data-remove="${i}" title="remove">&times;</button></li>`,
      )
      .join("");
    const pickers = roster
      .map(
        (r, i) =>
          `<button data-pick="${r.id}" ${form.notFound ? "disabled" : ""}>` +
          `<kbd>${i + 1}</kbd> ${esc(r.label)}</button>`,
      )
      .join(" ");
    if (form.currentStage === "confirming") {
      const summary = form.notFound
        ? "ballot NOT FOUND (worst case will be applied)"
        : form.currentRanking.length
          ? `ranking: ${form.currentRanking.join(", ")}`
          : "BLANK ballot";
      host.innerHTML =
        `<h3>Confirm ${esc(form.ballotId)}</h3>` +
        `<p class="confirm-summary">${esc(summary)}</p>` +
        '<button id="confirm-submit" class="primary">Submit (Enter)</button> ' +
        '<button id="confirm-back">Back (Esc)</button>';
      $("confirm-submit").onclick = () => void this.submit();
      $("confirm-back").onclick = () => {
        form.backToEditing();
        this.renderAll();
      };
      return;
    }
    host.innerHTML =
      `<h3>Ballot ${esc(form.ballotId)}</h3>` +
      `<div class="pickers">${pickers}</div>` +
      `<ol class="chosen">${chosen || "<li class='muted'>no preferences yet</li>"}</ol>` +
      `<label><input type="checkbox" id="nf" ${form.notFound ? "checked" : ""}/> ` +
      "ballot not found</label> " +
      '<button id="to-confirm" class="primary">Review (Enter)</button>' +
      '<span id="blank-ack-host"></span>';
    ($("nf") as HTMLInputElement).onchange = () => {
      form.toggleNotFound();
      this.renderAll();
    };
    $("to-confirm").onclick = () => this.tryConfirm();
    for (const b of host.querySelectorAll("button[data-pick]")) {
      b.addEventListener("click", () => {
        form.addCandidate(Number((b as HTMLElement).dataset.pick));
        this.renderAll();
      });
    }
    for (const b of host.querySelectorAll("button[data-move]")) {
      b.addEventListener("click", () => {
        const [i, d] = (b as HTMLElement).dataset.move!.split(",").map(Number);
        form.move(i!, d!);
        this.renderAll();
      });
    }
    for (const b of host.querySelectorAll("button[data-remove]")) {
      b.addEventListener("click", () => {
        form.removeAt(Number((b as HTMLElement).dataset.remove));
        this.renderAll();
      });
    }
  }

  private tryConfirm(): void {
    if (!this.form) return;
    const result = this.form.beginConfirm();
    if (!result.ok && result.needsBlankAck) {
      $("blank-ack-host").innerHTML =
        ' <button id="blank-ack" class="warning">Really blank? Click to confirm</button>';
      $("blank-ack").onclick = () => {
        this.form!.acknowledgeBlank();
        this.form!.beginConfirm();
        this.renderAll();
      };
      return;
    }
    this.renderAll();
  }

  private async submit(): Promise<void> {
    if (!this.form || !this.auditId || !this.status) return;
    const form = this.form;
    const ballotId = form.ballotId;
    try {
      // nothing updates optimistically: the dashboard re-renders only from
      // the acknowledged response
      const status = await this.api.submitMvr(this.auditId, form.payload());
      this.status = status;
      this.lastComparison = this.buildComparison(ballotId, status);
      this.form = null;
      this.renderAll();
      await this.renderTrees();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.showError(new Error(`ballot ${ballotId} was already entered: ${err.message}`));
        this.form = null;
        await this.refresh();
      } else {
        this.showError(err);
      }
    }
  }

  /** Post-submit comparison view (entry stays blind until acknowledged). */
  private buildComparison(ballotId: string, status: StatusResponse): string {
    const mismatch = status.discrepancies.includes(ballotId);
    if (!mismatch) {
      return `<div class="compare ok">Entry for ${esc(ballotId)} matches its electronic record.</div>`;
    }
    return (
      `<div class="compare warning">Entry for ${esc(ballotId)} differs from its electronic ` +
      "record (or the ballot was missing); the worst case was applied where needed.</div>"
    );
  }

  private async drawMore(): Promise<void> {
    if (!this.auditId) return;
    try {
      this.status = await this.api.drawMore(this.auditId, null);
      this.renderAll();
    } catch (err) {
      this.showError(err);
    }
  }

  private async escalate(): Promise<void> {
    if (!this.auditId) return;
    if (!window.confirm("Escalate to a full hand count?")) return;
    try {
      this.status = await this.api.escalate(this.auditId);
      this.renderAll();
    } catch (err) {
      this.showError(err);
    }
  }

  private async renderTrees(): Promise<void> {
    if (!this.auditId) return;
    try {
      const doc = parseTreedoc(await this.api.getTrees(this.auditId));
      $("trees").innerHTML = renderTreeView(doc);
    } catch (err) {
      // schema mismatch or parse failure: explicit panel, never partial trees
      $("trees").innerHTML = renderErrorPanel(
        err instanceof Error ? err.message : String(err),
      );
    }
  }

  /** Keyboard-first path: digits append, Backspace removes, Enter advances. */
  private onKey(event: KeyboardEvent): void {
    if (!this.form) return;
    if (event.target instanceof HTMLInputElement) return;
    if (event.key >= "1" && event.key <= "9") {
      this.form.addByPosition(Number(event.key));
      this.renderAll();
      event.preventDefault();
    } else if (event.key === "Backspace") {
      this.form.removeLast();
      this.renderAll();
      event.preventDefault();
    } else if (event.key === "Enter") {
      if (this.form.currentStage === "confirming") void this.submit();
      else this.tryConfirm();
      event.preventDefault();
    } else if (event.key === "Escape") {
      if (this.form.currentStage === "confirming") this.form.backToEditing();
      else this.form = null;
      this.renderAll();
      event.preventDefault();
    }
  }
}

new App().start().catch((err) => {
  document.body.innerHTML = renderErrorPanel(String(err));
});
