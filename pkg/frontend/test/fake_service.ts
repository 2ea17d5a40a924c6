// In-memory stand-in for the backend, speaking the same JSON protocol.
// Keeps a request log so tests can assert what went over the wire.

import type { FetchLike } from "../src/api.js";

interface RecordRow {
  id: number;
  patientId: number;
  code: string;
  status: "pending" | "dispensed";
  dispensedAt: string | null;
  items: { drug_id: number; dosage: string; quantity: number }[];
  advice: string;
}

export interface FakeService {
  fetch: FetchLike;
  requests: { method: string; url: string; body: string | null }[];
  records: RecordRow[];
  seedRecord(code: string): RecordRow;
}

const USERS: Record<string, { password: string; role: string }> = {
  ade: { password: "adepw", role: "prescriber" },
  bisi: { password: "bisipw", role: "dispenser" },
  root: { password: "rootpw", role: "administrator" },
};

const DRUGS = [
  { id: 1, name: "Paracetamol", interacts_with: [] as number[] },
  { id: 2, name: "Amoxicillin", interacts_with: [] as number[] },
  { id: 4, name: "Warfarin", interacts_with: [5] },
  { id: 5, name: "Aspirin", interacts_with: [4] },
];

const PATIENT = { id: 1, name: "OLUWOLE OLUWOLE", date_of_birth: "1985-03-19", allergies: [2] };

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function fail(status: number, code: string, message: string): Response {
  return json(status, { error: { code, message } });
}

export function fakeService(): FakeService {
  let nextId = 1;
  const records: RecordRow[] = [];
  const requests: FakeService["requests"] = [];

  const seedRecord = (code: string): RecordRow => {
    const row: RecordRow = {
      id: nextId++,
      patientId: 1,
      code,
      status: "pending",
      dispensedAt: null,
      items: [{ drug_id: 1, dosage: "500 mg twice daily", quantity: 20 }],
      advice: "plenty of fluids",
    };
    records.push(row);
    return row;
  };

  const fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const rawBody = typeof init?.body === "string" ? init.body : null;
    requests.push({ method, url, body: rawBody });
    const body = rawBody ? JSON.parse(rawBody) : null;
    const headers = (init?.headers ?? {}) as Record<string, string>;
    const path = url.split("?")[0] ?? url;

    if (path === "/login" && method === "POST") {
      const user = USERS[body.username];
      if (!user || user.password !== body.password) {
        return fail(401, "INVALID_CREDENTIALS", "invalid username or password");
      }
      return json(200, { token: "tok-" + body.username, role: user.role });
    }

    const auth = headers["authorization"] ?? "";
    if (!auth.startsWith("Bearer tok-")) {
      return fail(401, "INVALID_SESSION", "missing or invalid session token");
    }

    if (path === "/drugs" && method === "GET") return json(200, DRUGS);
    if (path === "/patients" && method === "GET") {
      const q = decodeURIComponent((url.split("q=")[1] ?? "").split("&")[0] ?? "");
      const hits = PATIENT.name.toLowerCase().includes(q.toLowerCase()) ? [PATIENT] : [];
      return json(200, hits);
    }

    if (path === "/prescriptions" && method === "POST") {
      const ids = body.items.map((i: { drug_id: number }) => i.drug_id);
      if (ids.includes(2)) {
        return fail(409, "ALLERGY_CONFLICT", "patient is allergic to drug 'Amoxicillin' (id 2)");
      }
      if (ids.includes(4) && ids.includes(5)) {
        return fail(
          409,
          "INTERACTION_CONFLICT",
          "drugs 'Warfarin' (id 4) and 'Aspirin' (id 5) have a registered interaction",
        );
      }
      const row = seedRecord("5550123456789");
      row.items = body.items;
      row.advice = body.advice;
      return json(201, { record_id: row.id, code: row.code });
    }

    const history = path.match(/^\/patients\/(\d+)\/history$/);
    if (history && method === "GET") {
      return json(
        200,
        records
          .filter((r) => r.patientId === Number(history[1]))
          .map((r) => ({
            record_id: r.id,
            issue_date: "2026-08-19",
            status: r.status,
            dispensed_at: r.dispensedAt,
          })),
      );
    }

    const stego = path.match(/^\/prescriptions\/(\d+)\/stego$/);
    if (stego && method === "GET") {
      const png = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 1, 2, 3]);
      return new Response(png, { status: 200, headers: { "content-type": "image/png" } });
    }

    const dispense = path.match(/^\/prescriptions\/(\d+)\/dispense$/);
    if (dispense && method === "POST") {
      const row = records.find((r) => r.id === Number(dispense[1]));
      if (!row) return fail(404, "UNKNOWN_RECORD", "no such record");
      if (row.status === "dispensed") {
        return fail(409, "ALREADY_DISPENSED", `record ${row.id} was already dispensed`);
      }
      if (body.code !== row.code) {
        return fail(400, "BAD_CODE", "code does not open this prescription");
      }
      row.status = "dispensed";
      row.dispensedAt = "2026-08-19T12:00:00+00:00";
      return json(200, {
        prescription: {
          patient_id: row.patientId,
          prescriber_id: 2,
          issue_date: "2026-08-19",
          items: row.items,
          advice: row.advice,
        },
        dispensed_at: row.dispensedAt,
      });
    }

    return fail(404, "NOT_FOUND", "no route " + path);
  };

  return { fetch: fetchImpl, requests, records, seedRecord };
}
