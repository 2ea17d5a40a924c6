// Thin typed client over the service's JSON routes. The bearer token lives
// in this object and nowhere else, never in persistent browser storage or
// the URL bar. The prescription code only ever travels in a POST body.

import type {
  CreateResult,
  DispenseResult,
  Drug,
  HistoryRow,
  LoginResponse,
  Patient,
  PrescriptionItem,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function toError(res: Response): Promise<ApiError> {
  let code = "HTTP_" + res.status;
  let message = res.statusText || "request failed";
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body, keep the fallback
  }
  return new ApiError(res.status, code, message);
}

export class Client {
  private token: string | null = null;

  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  hasToken(): boolean {
    return this.token !== null;
  }

  clearToken(): void {
    this.token = null;
  }

  private headers(json: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["content-type"] = "application/json";
    if (this.token) h["authorization"] = "Bearer " + this.token;
    return h;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchImpl(this.base + path, {
      method,
      headers: this.headers(body !== undefined),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) throw await toError(res);
    return (await res.json()) as T;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const out = await this.call<LoginResponse>("POST", "/login", { username, password });
    this.token = out.token;
    return out;
  }

  listDrugs(): Promise<Drug[]> {
    return this.call("GET", "/drugs");
  }

  searchPatients(q: string): Promise<Patient[]> {
    return this.call("GET", "/patients?q=" + encodeURIComponent(q));
  }

  createPrescription(
    patientId: number,
    items: PrescriptionItem[],
    advice: string,
  ): Promise<CreateResult> {
    return this.call("POST", "/prescriptions", {
      patient_id: patientId,
      items,
      advice,
    });
  }

  history(patientId: number): Promise<HistoryRow[]> {
    return this.call("GET", `/patients/${patientId}/history`);
  }

  async stegoPng(recordId: number): Promise<Uint8Array> {
    const res = await this.fetchImpl(
      this.base + `/prescriptions/${recordId}/stego`,
      { method: "GET", headers: this.headers(false) },
    );
    if (!res.ok) throw await toError(res);
    return new Uint8Array(await res.arrayBuffer());
  }

  dispense(recordId: number, code: string): Promise<DispenseResult> {
    // the code goes in the body, never in the path
    return this.call("POST", `/prescriptions/${recordId}/dispense`, { code });
  }
}
