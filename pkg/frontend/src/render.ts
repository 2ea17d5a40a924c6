// Page renderers. Every one returns an HTML string for the app shell to
// inject; event wiring happens by data-action attributes. The prescription
// code is rendered by exactly one function here, renderCodeCard.

import type { ViewState } from "./state.js";
import type { HistoryRow } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const esc = escapeHtml;

function shell(title: string, body: string, state: ViewState): string {
  const who = state.username
    ? `<div class="whoami">${esc(state.username)} (${esc(state.role ?? "")})
         <button data-action="logout">Log out</button></div>`
    : "";
  return `<header><h1>${esc(title)}</h1>${who}</header><main>${body}</main>`;
}

export function renderLogin(state: ViewState): string {
  const error = state.loginError
    ? `<p class="error" data-role="login-error">${esc(state.loginError)}</p>`
    : "";
  return shell(
    "e-Prescription Login",
    `<form data-action="login" class="card narrow">
       <label>Username <input name="username" autocomplete="username" required></label>
       <label>Password <input name="password" type="password" autocomplete="current-password" required></label>
       ${error}
       <button type="submit">Log in</button>
     </form>`,
    state,
  );
}

export function renderPrescribe(state: ViewState): string {
  const patientOptions = state.patients
    .map((p) => `<option value="${p.id}">${esc(p.name)} (${esc(p.date_of_birth)})</option>`)
    .join("");
  const drugOptions = state.drugs
    .map((d) => `<option value="${d.id}">${esc(d.name)}</option>`)
    .join("");
  let rows = "";
  for (let i = 0; i < state.itemRows; i++) {
    rows += `<fieldset class="item-row">
       <select name="drug-${i}"><option value="">(choose drug)</option>${drugOptions}</select>
       <input name="dosage-${i}" placeholder="dosage, e.g. 500 mg twice daily">
       <input name="qty-${i}" type="number" min="1" placeholder="qty" class="qty">
     </fieldset>`;
  }
  const error = state.prescribeError
    ? `<p class="error" data-role="prescribe-error">${esc(state.prescribeError)}</p>`
    : "";
  return shell(
    "New Prescription",
    `<form data-action="patient-search" class="inline">
       <input name="q" value="${esc(state.patientQuery)}" placeholder="search patients">
       <button type="submit">Search</button>
     </form>
     <form data-action="prescribe" class="card">
       <label>Patient
         <select name="patient" required>${patientOptions}</select>
       </label>
       ${rows}
       <button type="button" data-action="add-item">Add another drug</button>
       <label>Advice <input name="advice" placeholder="advice for the patient"></label>
       ${error}
       <button type="submit" data-role="submit-prescription">Record prescription</button>
     </form>`,
    state,
  );
}

export function renderConfirm(state: ViewState): string {
  const s = state.confirmSummary;
  if (!s) return renderPrescribe(state);
  return shell(
    "Prescription Recorded",
    `<div class="card" data-role="confirmation">
       <p>Prescription #${s.recordId} for ${esc(s.patient)} was sealed and stored
          (${s.itemCount} item${s.itemCount === 1 ? "" : "s"}).</p>
       <p>The prescription code is shown once, on the printable card. It is not
          stored anywhere, so hand it to the patient.</p>
       <button data-action="show-card">Show code card</button>
     </div>`,
    state,
  );
}

export function renderCodeCard(state: ViewState): string {
  const card = state.card;
  if (!card) return renderPrescribe(state);
  return shell(
    "Prescription Code Card",
    `<div class="card code-card" data-role="code-card">
       <table>
         <tr><th>Doctor</th><td>${esc(card.doctor)}</td></tr>
         <tr><th>Patient</th><td>${esc(card.patient)}</td></tr>
         <tr><th>Prescription Code</th><td class="code">${esc(card.code)}</td></tr>
         <tr><th>Date</th><td>${esc(card.date)}</td></tr>
       </table>
       <div class="no-print">
         <button data-action="print">Print</button>
         <button data-action="done">Done</button>
       </div>
       <p class="no-print hint">Once you leave this page the code cannot be shown again.</p>
     </div>`,
    state,
  );
}

function historyTable(rows: HistoryRow[]): string {
  if (rows.length === 0) return "<p>No prescriptions on file.</p>";
  const body = rows
    .map((r) => {
      const action =
        r.status === "pending"
          ? `<button data-action="open-record" data-record="${r.record_id}">Dispense</button>`
          : esc(r.dispensed_at ?? "");
      return `<tr><td>#${r.record_id}</td><td>${esc(r.issue_date)}</td>
              <td class="status-${r.status}">${r.status}</td><td>${action}</td></tr>`;
    })
    .join("");
  return `<table class="history"><tr><th>Record</th><th>Issued</th><th>Status</th><th></th></tr>${body}</table>`;
}

export function renderHistory(state: ViewState): string {
  const patientButtons = state.historyPatients
    .map(
      (p) =>
        `<button data-action="pick-patient" data-patient="${p.id}">${esc(p.name)} (${esc(p.date_of_birth)})</button>`,
    )
    .join(" ");
  const selected = state.historyPatient
    ? `<h2>${esc(state.historyPatient.name)}</h2>` + historyTable(state.historyRows)
    : "<p>Search for a patient to see their prescriptions.</p>";
  return shell(
    "Patient History",
    `<form data-action="history-search" class="inline">
       <input name="q" placeholder="search patients">
       <button type="submit">Search</button>
     </form>
     <div class="patient-list">${patientButtons}</div>
     <div class="card">${selected}</div>`,
    state,
  );
}

export function renderDispenseEntry(state: ViewState): string {
  const error = state.dispenseError
    ? `<p class="error" data-role="dispense-error">${esc(state.dispenseError)}</p>`
    : "";
  const terminal = state.dispenseTerminal
    ? `<p class="error terminal" data-role="dispense-terminal">${esc(state.dispenseTerminal)}</p>
       <button data-action="back-to-history">Back to history</button>`
    : `<form data-action="dispense" class="inline">
         <input name="code" inputmode="numeric" autocomplete="off"
                placeholder="prescription code" required>
         <button type="submit">Unseal</button>
       </form>${error}`;
  return shell(
    "Dispense Prescription",
    `<div class="card" data-role="dispense-entry">
       <p>Record #${state.openRecordId ?? ""}. The prescription is sealed inside
          this image; enter the patient's code to open it.</p>
       <img data-stego alt="sealed prescription image">
       ${terminal}
     </div>`,
    state,
  );
}

export function renderPrescriptionView(state: ViewState): string {
  const p = state.prescription;
  if (!p) return renderHistory(state);
  const nameOf = (id: number) => {
    const drug = state.drugs.find((d) => d.id === id);
    return drug ? drug.name : `drug #${id}`;
  };
  const items = p.items
    .map(
      (i) =>
        `<tr><td>${esc(nameOf(i.drug_id))}</td><td>${esc(i.dosage)}</td><td>${i.quantity}</td></tr>`,
    )
    .join("");
  const advice = p.advice ? `<p>Advice: ${esc(p.advice)}</p>` : "";
  return shell(
    "Prescription",
    `<div class="card" data-role="prescription-view">
       <p>Issued ${esc(p.issue_date)} for patient #${p.patient_id}.</p>
       <table class="items"><tr><th>Drug</th><th>Dosage</th><th>Qty</th></tr>${items}</table>
       ${advice}
       <button data-action="ack" data-role="dispense-button">Dispense</button>
     </div>`,
    state,
  );
}

export function renderDispenseConfirm(state: ViewState): string {
  return shell(
    "Dispensed",
    `<div class="card" data-role="dispense-confirm">
       <p>Prescription #${state.openRecordId ?? ""} dispensed at
          ${esc(state.dispensedAt ?? "")}.</p>
       <button data-action="back-to-history">Back to history</button>
     </div>`,
    state,
  );
}

export function renderApp(state: ViewState, loggedIn: boolean): string {
  if (!loggedIn || state.page === "login") return renderLogin(state);
  switch (state.page) {
    case "prescribe":
      return renderPrescribe(state);
    case "confirm":
      return renderConfirm(state);
    case "code-card":
      return renderCodeCard(state);
    case "history":
      return renderHistory(state);
    case "dispense-entry":
      return renderDispenseEntry(state);
    case "prescription-view":
      return renderPrescriptionView(state);
    case "dispense-confirm":
      return renderDispenseConfirm(state);
    default:
      return renderLogin(state);
  }
}
