// In-memory view state and the role/page routing rules. There is no URL
// router on purpose: the page lives in this object only, so neither the
// token nor the prescription code can leak into the address bar or the
// browser history.

import type { Drug, HistoryRow, Patient, Prescription, Role } from "./types.js";

export type Page =
  | "login"
  | "prescribe"
  | "confirm"
  | "code-card"
  | "history"
  | "dispense-entry"
  | "prescription-view"
  | "dispense-confirm";

export const PRESCRIBER_PAGES: readonly Page[] = ["prescribe", "confirm", "code-card"];
export const DISPENSER_PAGES: readonly Page[] = [
  "history",
  "dispense-entry",
  "prescription-view",
  "dispense-confirm",
];

export interface CodeCard {
  doctor: string;
  patient: string;
  code: string;
  date: string;
}

export interface ViewState {
  page: Page;
  role: Role | null;
  username: string | null;
  loginError: string | null;

  // prescriber side
  drugs: Drug[];
  patients: Patient[];
  patientQuery: string;
  itemRows: number;
  prescribeError: string | null;
  confirmSummary: { recordId: number; patient: string; itemCount: number } | null;
  card: CodeCard | null;

  // dispenser side
  historyPatients: Patient[];
  historyPatient: Patient | null;
  historyRows: HistoryRow[];
  openRecordId: number | null;
  stegoPng: Uint8Array | null;
  dispenseError: string | null;
  dispenseTerminal: string | null;
  prescription: Prescription | null;
  dispensedAt: string | null;
}

export function initialState(): ViewState {
  return {
    page: "login",
    role: null,
    username: null,
    loginError: null,
    drugs: [],
    patients: [],
    patientQuery: "",
    itemRows: 1,
    prescribeError: null,
    confirmSummary: null,
    card: null,
    historyPatients: [],
    historyPatient: null,
    historyRows: [],
    openRecordId: null,
    stegoPng: null,
    dispenseError: null,
    dispenseTerminal: null,
    prescription: null,
    dispensedAt: null,
  };
}

export function landingPage(role: Role): Page | null {
  if (role === "prescriber") return "prescribe";
  if (role === "dispenser") return "history";
  return null; // administrators manage the system elsewhere
}

export function pagesFor(role: Role | null): readonly Page[] {
  if (role === "prescriber") return PRESCRIBER_PAGES;
  if (role === "dispenser") return DISPENSER_PAGES;
  return [];
}

export function canView(role: Role | null, loggedIn: boolean, page: Page): boolean {
  if (page === "login") return true;
  if (!loggedIn) return false;
  return pagesFor(role).includes(page);
}

/** Route to a page, dropping the code card whenever we leave it. */
export function goto(state: ViewState, page: Page, loggedIn: boolean): ViewState {
  if (!canView(state.role, loggedIn, page)) {
    return { ...state, page: "login" };
  }
  const next = { ...state, page };
  if (state.page === "code-card" && page !== "code-card") {
    next.card = null; // the code is gone for good once the card is dismissed
  }
  return next;
}
