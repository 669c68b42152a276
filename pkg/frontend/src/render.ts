/** HTML renderers. Pure string builders so they stay testable headlessly;
 * app.ts owns the actual DOM. */
import { DashboardModel } from "./dashboard.js";
import { Treedoc, TreedocAssertion, TreeNode } from "./treedoc.js";
import { DrawView } from "./types.js";

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderBanner(model: DashboardModel): string {
  const extra = model.worstCaseApplied
    ? '<div class="warning">A ballot could not be found; the worst case was applied.</div>'
    : "";
  return `<div class="banner ${model.banner.tone}">${esc(model.banner.label)}</div>${extra}`;
}

export function renderAssertionRows(model: DashboardModel): string {
  const rows = model.rows
    .map((r) => {
      const badge = r.confirmed
        ? '<span class="badge ok">confirmed</span>'
        : '<span class="badge busy">open</span>';
      return (
        `<tr class="${r.confirmed ? "confirmed" : "open"}">` +
        `<td>${r.index}</td>` +
        `<td class="explanation">${esc(r.explanation)}</td>` +
        `<td class="mono" title="${esc(r.p)}">${r.pValue.toPrecision(4)}</td>` +
        `<td>${badge}</td>` +
        `<td class="mono">${esc(r.estimate)}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    '<table class="assertions"><thead><tr>' +
    "<th>#</th><th>Assertion</th><th>Risk (p)</th><th>Status</th><th>Est. more draws</th>" +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderProgress(model: DashboardModel): string {
  const suggestion =
    model.banner.status === "in_progress" && model.suggestedDraws !== null
      ? ` &middot; suggested additional draws: ${model.suggestedDraws}`
      : "";
  return (
    `<p class="progress">${model.enteredCount} of ${model.drawCount} drawn ballots ` +
    `entered${suggestion}</p>`
  );
}

export function renderPendingList(pending: DrawView[], selected: string | null): string {
  if (pending.length === 0) {
    return '<p class="done">No ballots waiting for entry.</p>';
  }
  const items = pending
    .map((d) => {
      const where =
        d.container !== null ? ` <span class="muted">${esc(d.container)} #${d.container_offset}</span>` : "";
      const phantom = d.phantom ? ' <span class="badge alert">phantom</span>' : "";
      const cls = d.ballot_id === selected ? ' class="selected"' : "";
      return (
        `<li${cls}><button data-ballot="${esc(d.ballot_id)}">` +
        `#${d.draw_index} ${esc(d.ballot_id)}</button>${where}${phantom}</li>`
      );
    })
    .join("");
  return `<ul class="pending">${items}</ul>`;
}

function nodeLabel(node: TreeNode, doc: Treedoc): string {
  const name = doc.candidates.get(node.candidate);
  return name ? `${node.candidate} ${name}` : String(node.candidate);
}

function assertionText(index: number, assertions: TreedocAssertion[]): string {
  const a = assertions[index];
  if (!a) return `assertion ${index}`;
  return a.explanation ?? a.token;
}

function renderNode(node: TreeNode, doc: Treedoc): string {
  const label = esc(nodeLabel(node, doc));
  if (node.annotation.startsWith("pruned=")) {
    const index = Number(node.annotation.slice("pruned=".length));
    const status = doc.assertions[index]?.status ?? "untested";
    return (
      `<li class="pruned ${status === "confirmed" ? "confirmed" : ""}">` +
      `${label} <span class="prune-label">pruned by [${index}] ` +
      `${esc(assertionText(index, doc.assertions))}` +
      (status === "confirmed" ? ' <span class="badge ok">confirmed</span>' : "") +
      `</span></li>`
    );
  }
  const cls = node.annotation === "unpruned" ? ' class="unpruned"' : "";
  const children = node.children.map((c) => renderNode(c, doc)).join("");
  const flag =
    node.annotation === "unpruned"
      ? ' <span class="badge alert">UNPRUNED PATH</span>'
      : "";
  if (!children) {
    return `<li${cls}>${label}${flag}</li>`;
  }
  return (
    `<li${cls}><details open><summary>${label}${flag}</summary>` +
    `<ul>${children}</ul></details></li>`
  );
}

/** One collapsible tree per alternative winner; pruned subtrees stay
 * collapsed behind their assertion label, open paths are flagged end to end. */
export function renderTreeView(doc: Treedoc): string {
  const trees = doc.trees
    .map((tree) => {
      const name = doc.candidates.get(tree.altWinner);
      const title = name ? `${tree.altWinner} ${name}` : String(tree.altWinner);
      return (
        `<section class="tree"><h3>Alternative winner ${esc(title)}</h3>` +
        `<ul class="tree-root">${renderNode(tree.root, doc)}</ul></section>`
      );
    })
    .join("");
  return trees || '<p class="done">No alternative winners to display.</p>';
}

export function renderErrorPanel(message: string): string {
  return `<div class="error-panel">${esc(message)}</div>`;
}
