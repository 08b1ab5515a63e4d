// Typed client for the broker HTTP API (see ../../docs/api.md).

export interface QueryFields {
  title: string;
  author: string;
  subject: string;
}

export interface DatabaseInfo {
  db_id: string;
  name: string;
  sampled_count: number;
  capabilities: string[];
  failed: boolean;
  stale: boolean;
}

export type RankStatus = "scored" | "unsupported" | "failed";

export interface RankedEntry {
  db_id: string;
  name: string;
  score: number;
  status: RankStatus;
  stale: boolean;
}

export interface RankResponse {
  query: Record<string, string[]>;
  databases: RankedEntry[];
}

export interface RecordSummary {
  system_id: string | null;
  title: string;
  authors: string[];
  subjects: string[];
  isbn: string | null;
  issn: string | null;
  locator?: string;
}

export interface DbResultOk {
  db_id: string;
  status: "ok";
  total_hits: number;
  records: RecordSummary[];
}

export interface DbResultError {
  db_id: string;
  status: "error";
  error: string;
}

export type DbResult = DbResultOk | DbResultError;

export interface SubmitResponse {
  query: Record<string, string[]>;
  results: DbResult[];
}

export interface RecordDetail {
  db_id: string;
  record: RecordSummary;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (url, init) => globalThis.fetch(url, init);

export class BrokerApi {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, `broker unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listDatabases(): Promise<{ databases: DatabaseInfo[] }> {
    return this.request("/api/databases");
  }

  rank(fields: QueryFields): Promise<RankResponse> {
    return this.post("/api/rank", fields);
  }

  /** Search one database; panels stay independent by calling this per selection. */
  submitOne(
    fields: QueryFields,
    dbId: string,
    maxRecords: number,
  ): Promise<DbResult> {
    return this.post<SubmitResponse>("/api/submit", {
      ...fields,
      selections: [{ db_id: dbId, max_records: maxRecords }],
    }).then((body) => {
      const result = body.results[0];
      if (!result) throw new ApiError(0, "empty submit response");
      return result;
    });
  }

  recordDetail(locator: string): Promise<RecordDetail> {
    return this.request(`/api/record/${locator}`);
  }
}
