/** DOM wiring: everything browser-specific lives here, nothing else does. */

import { ApiError, HttpApi, type RetrievalApi } from "./api.js";
import {
  SessionState,
  loadSession,
  saveSession,
  type StorageLike,
} from "./state.js";
import { escapeHtml, renderTables } from "./table.js";

export class Workbench {
  readonly state: SessionState;
  private inflight = new Set<string>();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: RetrievalApi,
    private readonly storage: StorageLike | null,
  ) {
    this.state = (storage && loadSession(storage)) ?? new SessionState();
  }

  async start(): Promise<void> {
    this.root.innerHTML = this.shell();
    this.bind();
    try {
      const listing = await this.api.approaches();
      this.renderApproachBoxes(
        listing.approaches.map((a) => a.name),
        listing.approaches.map((a) => a.description),
        listing.default,
      );
      const health = await this.api.health();
      this.note(
        health.corpus_loaded
          ? `corpus loaded: ${health.nodes} publications, ${health.edges} citations`
          : "service still loading its corpus",
        true,
      );
    } catch (err) {
      this.note(`service unreachable: ${describe(err)}`, false);
    }
    this.renderSeeds();
    this.renderRankings();
  }

  private shell(): string {
    return `
<header>
  <h1>seed workbench</h1>
  <p class="status" id="status"></p>
</header>
<section class="controls">
  <label>publication id <input type="number" id="seed-input" min="0"></label>
  <button id="add-seed">add seed</button>
  <span id="approach-boxes"></span>
  <label>k <input type="number" id="k-input" value="50" min="1" size="5"></label>
  <label>tie seed <input type="number" id="tie-input" value="0" size="5"></label>
  <button id="fetch">fetch rankings</button>
  <button id="undo">undo promotion</button>
  <button id="export">export session</button>
  <label class="import">import <input type="file" id="import-file" accept="application/json"></label>
</section>
<section id="seeds"></section>
<section id="rankings"></section>`;
  }

  private bind(): void {
    this.el("add-seed").addEventListener("click", () => this.onAddSeed());
    this.el("fetch").addEventListener("click", () => void this.fetchAll());
    this.el("undo").addEventListener("click", () => this.onUndo());
    this.el("export").addEventListener("click", () => this.onExport());
    this.el("import-file").addEventListener("change", (ev) =>
      void this.onImport(ev),
    );
    // promotions and seed removals arrive by delegation
    this.root.addEventListener("click", (ev) => {
      const target = ev.target as HTMLElement;
      if (target.matches("button.promote")) {
        this.onPromote(Number(target.dataset.pubId));
      } else if (target.matches("button.drop-seed")) {
        this.onDropSeed(Number(target.dataset.pubId));
      }
    });
  }

  private el(id: string): HTMLElement {
    const found = this.root.querySelector(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found as HTMLElement;
  }

  private note(message: string, ok: boolean): void {
    const status = this.el("status");
    status.textContent = message;
    status.className = ok ? "status ok" : "status error";
  }

  private renderApproachBoxes(
    names: string[],
    descriptions: string[],
    preselected: string,
  ): void {
    const boxes = names
      .map((name, i) => {
        const checked = name === preselected ? " checked" : "";
        return `<label title="${escapeHtml(descriptions[i] ?? "")}">
          <input type="checkbox" class="approach" value="${name}"${checked}> ${name}
        </label>`;
      })
      .join("");
    this.el("approach-boxes").innerHTML = boxes;
    this.state.selectApproaches([preselected]);
    this.root.querySelectorAll("input.approach").forEach((box) => {
      box.addEventListener("change", () => {
        const picked = [
          ...this.root.querySelectorAll<HTMLInputElement>(
            "input.approach:checked",
          ),
        ].map((b) => b.value);
        this.state.selectApproaches(picked);
        this.renderRankings();
      });
    });
  }

  private renderSeeds(): void {
    const items = this.state.seeds
      .map(
        (s) =>
          `<li>[${s.pubId}] ${escapeHtml(s.title || "(title unknown)")}
           <button class="drop-seed" data-pub-id="${s.pubId}">remove</button></li>`,
      )
      .join("");
    this.el("seeds").innerHTML = `<h2>seeds (${this.state.seeds.length})</h2><ul>${items}</ul>`;
    if (this.storage) saveSession(this.state, this.storage);
  }

  private renderRankings(): void {
    this.el("rankings").innerHTML = renderTables(
      this.state.rankings,
      this.state.stale,
    );
  }

  private onAddSeed(): void {
    const input = this.el("seed-input") as HTMLInputElement;
    const pubId = Number(input.value);
    const outcome = this.state.addSeed(pubId);
    this.note(outcome.message, outcome.ok);
    if (outcome.ok) {
      input.value = "";
      void this.backfillTitle(pubId);
    }
    this.renderSeeds();
    this.renderRankings();
  }

  private async backfillTitle(pubId: number): Promise<void> {
    try {
      const pub = await this.api.publication(pubId);
      const entry = this.state.seeds.find((s) => s.pubId === pubId);
      if (entry && !entry.title) {
        (entry as { title: string }).title = pub.title;
        this.renderSeeds();
      }
    } catch {
      /* unknown to the corpus — the retrieve call will say so properly */
    }
  }

  private onDropSeed(pubId: number): void {
    const outcome = this.state.removeSeed(pubId);
    this.note(outcome.message, outcome.ok);
    this.renderSeeds();
    this.renderRankings();
  }

  private onPromote(pubId: number): void {
    const outcome = this.state.promoteSeed(pubId);
    this.note(outcome.message, outcome.ok);
    this.renderSeeds();
    this.renderRankings();
  }

  private onUndo(): void {
    const outcome = this.state.undoPromotion();
    this.note(outcome.message, outcome.ok);
    this.renderSeeds();
    this.renderRankings();
  }

  async fetchAll(): Promise<void> {
    if (this.state.seeds.length === 0) {
      this.note("add at least one seed first", false);
      return;
    }
    const kBox = this.el("k-input") as HTMLInputElement;
    const tieBox = this.el("tie-input") as HTMLInputElement;
    this.state.k = Math.max(1, Number(kBox.value) || 50);
    this.state.tieSeed = Number(tieBox.value) || 0;

    await Promise.all(
      this.state.approaches.map((approach) => this.fetchOne(approach)),
    );
    this.renderRankings();
  }

  private async fetchOne(approach: string): Promise<void> {
    if (this.inflight.has(approach)) return; // one request per approach
    this.inflight.add(approach);
    const ticket = this.state.beginRequest(approach);
    try {
      const response = await this.api.retrieve(this.state.buildRequest(approach));
      if (this.state.acceptResponse(approach, ticket, response)) {
        this.note(`fetched ${approach}`, true);
      }
    } catch (err) {
      // errors surface in the status line; seed list stays intact
      this.note(`${approach}: ${describe(err)}`, false);
    } finally {
      this.inflight.delete(approach);
    }
  }

  private onExport(): void {
    const payload = JSON.stringify(this.state.exportSession(), null, 2);
    const blob = new Blob([payload], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "seedgraph-session.json";
    link.click();
    URL.revokeObjectURL(link.href);
    this.note("session exported", true);
  }

  private async onImport(ev: Event): Promise<void> {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file) return;
    try {
      const imported = SessionState.importSession(JSON.parse(await file.text()));
      this.state.selectApproaches([...imported.approaches]);
      // rebuild the seed list in place
      for (const seed of [...this.state.seeds]) {
        this.state.removeSeed(seed.pubId);
      }
      for (const seed of imported.seeds) {
        this.state.addSeed(seed.pubId, seed.title);
        void this.backfillTitle(seed.pubId);
      }
      this.note(`imported ${imported.seeds.length} seeds`, true);
    } catch (err) {
      this.note(`import failed: ${describe(err)}`, false);
    }
    this.renderSeeds();
    this.renderRankings();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.status}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}

/* boot in a real browser; tests import the pieces directly */
if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    const workbench = new Workbench(
      root,
      new HttpApi(""),
      typeof localStorage !== "undefined" ? localStorage : null,
    );
    void workbench.start();
  }
}
