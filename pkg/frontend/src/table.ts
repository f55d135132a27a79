/** Pure view models and HTML for the side-by-side ranking tables.
 *
 * Numbers pass through untouched from the service response — the model
 * holds the same values the JSON carried, and rendering stringifies
 * them without rounding, so what the user reads is what the service
 * said.
 */

import type { ComponentScores, RetrieveResponse } from "./types.js";

export interface TableRow {
  rank: number;
  pubId: number;
  title: string;
  year: number | null;
  score: number;
  components: ComponentScores;
  /** How many displayed tables contain this publication (>=1). */
  sharedCount: number;
}

export interface TableModel {
  approach: string;
  totalCandidates: number;
  rows: TableRow[];
}

export function buildTables(
  responses: ReadonlyMap<string, RetrieveResponse>,
): TableModel[] {
  const appearances = new Map<number, number>();
  for (const response of responses.values()) {
    const seen = new Set<number>();
    for (const row of response.results) {
      if (!seen.has(row.pub_id)) {
        seen.add(row.pub_id);
        appearances.set(row.pub_id, (appearances.get(row.pub_id) ?? 0) + 1);
      }
    }
  }
  const models: TableModel[] = [];
  for (const [approach, response] of responses) {
    models.push({
      approach,
      totalCandidates: response.total_candidates,
      rows: response.results.map((r) => ({
        rank: r.rank,
        pubId: r.pub_id,
        title: r.title,
        year: r.year,
        score: r.score,
        components: r.components,
        sharedCount: appearances.get(r.pub_id) ?? 1,
      })),
    });
  }
  return models;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function badge(name: keyof ComponentScores, value: number): string {
  return `<span class="badge badge-${name}" title="${name} component">${name} ${String(value)}</span>`;
}

export function renderTable(model: TableModel, stale: boolean): string {
  const rows = model.rows
    .map((row) => {
      const shared = row.sharedCount > 1 ? " shared" : "";
      const year = row.year === null ? "—" : String(row.year);
      const badges = (["dc", "bc", "cc", "ra"] as const)
        .map((c) => badge(c, row.components[c]))
        .join(" ");
      return [
        `<tr class="result${shared}" data-pub-id="${row.pubId}">`,
        `<td class="rank">${row.rank}</td>`,
        `<td class="pub-id">${row.pubId}</td>`,
        `<td class="title">${escapeHtml(row.title)}`,
        row.sharedCount > 1
          ? ` <span class="shared-mark" title="appears in ${row.sharedCount} tables">&#9733;${row.sharedCount}</span>`
          : "",
        `</td>`,
        `<td class="year">${year}</td>`,
        `<td class="score">${String(row.score)}</td>`,
        `<td class="components">${badges}</td>`,
        `<td><button class="promote" data-pub-id="${row.pubId}">+ seed</button></td>`,
        `</tr>`,
      ].join("");
    })
    .join("\n");

  return [
    `<section class="ranking${stale ? " stale" : ""}" data-approach="${model.approach}">`,
    `<h3>${escapeHtml(model.approach)} <small>${model.totalCandidates} candidates${stale ? " — stale, refetch" : ""}</small></h3>`,
    `<table>`,
    `<thead><tr><th>#</th><th>pub</th><th>title</th><th>year</th><th>score</th><th>components</th><th></th></tr></thead>`,
    `<tbody>`,
    rows,
    `</tbody>`,
    `</table>`,
    `</section>`,
  ].join("\n");
}

export function renderTables(
  responses: ReadonlyMap<string, RetrieveResponse>,
  stale: boolean,
): string {
  const models = buildTables(responses);
  if (models.length === 0) {
    return `<p class="empty">no rankings yet — add seeds and fetch</p>`;
  }
  return models.map((m) => renderTable(m, stale)).join("\n");
}
