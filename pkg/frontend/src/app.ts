// Single-page flow: query form -> ranked database list with selection
// -> independent per-database result panels -> record detail overlay.
//
// The page holds no server-side state: refreshing restarts at the form.

import {
  ApiError,
  BrokerApi,
  DbResult,
  QueryFields,
  RankedEntry,
  RecordSummary,
} from "./api.js";

const SCORE_DECIMALS = 2;
const DEFAULT_MAX_RECORDS = 10;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function fieldRow(labelText: string, input: HTMLInputElement): HTMLElement {
  const row = el("div", "field-row");
  const label = el("label", "", labelText);
  label.htmlFor = input.id;
  row.append(label, input);
  return row;
}

export class App {
  private query: QueryFields = { title: "", author: "", subject: "" };

  constructor(
    private readonly root: HTMLElement,
    private readonly api: BrokerApi,
  ) {}

  start(): void {
    this.renderForm();
  }

  // -- query form ----------------------------------------------------------

  private renderForm(): void {
    this.root.replaceChildren();
    const form = el("form", "query-form");
    form.noValidate = true;

    const inputs: Record<keyof QueryFields, HTMLInputElement> = {
      author: el("input"),
      title: el("input"),
      subject: el("input"),
    };
    for (const [name, input] of Object.entries(inputs)) {
      input.type = "text";
      input.id = `query-${name}`;
      input.name = name;
      input.value = this.query[name as keyof QueryFields];
    }
    form.append(
      el("h1", "", "Search the catalog fleet"),
      fieldRow("Author", inputs.author),
      fieldRow("Title", inputs.title),
      fieldRow("Subject", inputs.subject),
    );

    const submit = el("button", "", "Rank databases");
    submit.type = "submit";
    const message = el("p", "form-message");
    form.append(submit, message);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const fields: QueryFields = {
        title: inputs.title.value.trim(),
        author: inputs.author.value.trim(),
        subject: inputs.subject.value.trim(),
      };
      if (!fields.title && !fields.author && !fields.subject) {
        message.textContent = "Enter at least one search term.";
        return;
      }
      message.textContent = "";
      this.query = fields;
      void this.rank(message);
    });

    this.root.append(form);
  }

  private async rank(message: HTMLElement): Promise<void> {
    try {
      const response = await this.api.rank(this.query);
      this.renderRanked(response.databases);
    } catch (err) {
      message.className = "form-message error-banner";
      message.replaceChildren();
      message.append(
        el("span", "", describeError(err)),
        makeRetry(() => void this.rank(message)),
      );
    }
  }

  // -- ranked list ---------------------------------------------------------

  private renderRanked(databases: RankedEntry[]): void {
    this.root.replaceChildren();
    const layout = el("div", "layout");
    const left = el("section", "ranked-list");
    const right = el("section", "result-area");
    layout.append(left, right);

    left.append(el("h2", "", "Databases by estimated relevance"));
    const back = el("button", "back-link", "New query");
    back.type = "button";
    back.addEventListener("click", () => this.renderForm());
    left.append(back);

    const maxScore = Math.max(...databases.map((d) => d.score), 0);
    const list = el("ul", "db-list");
    interface Row {
      entry: RankedEntry;
      checkbox: HTMLInputElement;
      maxInput: HTMLInputElement;
    }
    const rows: Row[] = [];

    for (const entry of databases) {
      const item = el("li", `db-row status-${entry.status}`);
      const checkbox = el("input");
      checkbox.type = "checkbox";
      checkbox.className = "db-select";
      // Healthy databases start selected; failed or unsupported ones
      // must be opted into explicitly.
      checkbox.checked = entry.status === "scored";

      const name = el("span", "db-name", entry.name);
      const score = el("span", "db-score", entry.score.toFixed(SCORE_DECIMALS));
      const bar = el("span", "score-bar");
      bar.style.width = maxScore > 0 ? `${(entry.score / maxScore) * 100}%` : "0";

      const maxInput = el("input");
      maxInput.type = "number";
      maxInput.className = "db-max";
      maxInput.min = "1";
      maxInput.value = String(DEFAULT_MAX_RECORDS);

      item.append(checkbox, name, score, bar, maxInput);
      if (entry.status !== "scored") {
        item.append(el("span", `badge badge-${entry.status}`, entry.status));
      }
      if (entry.stale) {
        item.append(el("span", "badge badge-stale", "stale"));
      }
      list.append(item);
      rows.push({ entry, checkbox, maxInput });
    }
    left.append(list);

    const submit = el("button", "submit-selected", "Search selected");
    submit.type = "button";
    const syncDisabled = () => {
      submit.disabled = !rows.some((r) => r.checkbox.checked);
    };
    for (const row of rows) {
      row.checkbox.addEventListener("change", syncDisabled);
    }
    syncDisabled();
    submit.addEventListener("click", () => {
      const selected = rows
        .filter((r) => r.checkbox.checked)
        .map((r) => ({
          dbId: r.entry.db_id,
          name: r.entry.name,
          maxRecords: Math.max(1, Number(r.maxInput.value) || DEFAULT_MAX_RECORDS),
        }));
      this.renderPanels(right, selected);
    });
    left.append(submit);

    this.root.append(layout);
  }

  // -- result panels -------------------------------------------------------

  private renderPanels(
    area: HTMLElement,
    selected: { dbId: string; name: string; maxRecords: number }[],
  ): void {
    area.replaceChildren();
    for (const sel of selected) {
      const panel = el("div", "result-panel");
      panel.dataset.db = sel.dbId;
      panel.append(el("h3", "", sel.name), el("p", "panel-status", "Searching..."));
      area.append(panel);
      // Panels fill in independently as each database answers.
      this.api
        .submitOne(this.query, sel.dbId, sel.maxRecords)
        .then((result) => this.fillPanel(panel, result))
        .catch((err) => {
          panel.replaceChildren(
            el("h3", "", sel.name),
            el("p", "panel-error", describeError(err)),
          );
        });
    }
  }

  private fillPanel(panel: HTMLElement, result: DbResult): void {
    const title = panel.querySelector("h3")?.textContent ?? result.db_id;
    panel.replaceChildren(el("h3", "", title));
    if (result.status === "error") {
      panel.append(el("p", "panel-error", result.error));
      return;
    }
    const shown = result.records.length;
    const counts =
      shown < result.total_hits
        ? `showing ${shown} of ${result.total_hits}`
        : `${result.total_hits} hit${result.total_hits === 1 ? "" : "s"}`;
    panel.append(el("p", "panel-counts", counts));

    const list = el("ul", "record-list");
    for (const record of result.records) {
      const item = el("li", "record-row");
      const link = el("a", "record-link", record.title);
      link.href = "#";
      link.addEventListener("click", (event) => {
        event.preventDefault();
        if (record.locator) void this.showDetail(record.locator);
      });
      item.append(link);
      if (record.authors.length) {
        item.append(el("span", "record-authors", record.authors.join("; ")));
      }
      list.append(item);
    }
    panel.append(list);
  }

  // -- record detail -------------------------------------------------------

  private async showDetail(locator: string): Promise<void> {
    let detailBody: HTMLElement;
    try {
      const detail = await this.api.recordDetail(locator);
      detailBody = renderRecordFields(detail.record, detail.db_id);
    } catch (err) {
      detailBody = el("p", "panel-error", describeError(err));
    }
    const overlay = el("div", "detail-overlay");
    const box = el("div", "detail-box");
    const close = el("button", "detail-close", "Close");
    close.type = "button";
    close.addEventListener("click", () => overlay.remove());
    box.append(close, detailBody);
    overlay.append(box);
    this.root.append(overlay);
  }
}

function renderRecordFields(record: RecordSummary, dbId: string): HTMLElement {
  const table = el("table", "record-detail");
  const rows: [string, string][] = [["database", dbId]];
  if (record.system_id) rows.push(["id", record.system_id]);
  rows.push(["title", record.title]);
  for (const author of record.authors) rows.push(["author", author]);
  for (const subject of record.subjects) rows.push(["subject", subject]);
  if (record.isbn) rows.push(["isbn", record.isbn]);
  if (record.issn) rows.push(["issn", record.issn]);
  for (const [name, value] of rows) {
    const tr = el("tr");
    tr.append(el("th", "", name), el("td", "", value));
    table.append(tr);
  }
  return table;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `Error ${err.status}: ${err.message}`;
  }
  return String(err);
}

function makeRetry(onRetry: () => void): HTMLButtonElement {
  const button = el("button", "retry", "Retry");
  button.type = "button";
  button.addEventListener("click", onRetry);
  return button;
}
