// The controller: owns the view state, talks to the API client, and hands
// rendered HTML to whatever sink mounted it (the real DOM in the browser,
// a string collector in tests).

import { ApiError, Client } from "./api.js";
import { renderApp } from "./render.js";
import {
  goto,
  initialState,
  landingPage,
  type Page,
  type ViewState,
} from "./state.js";
import type { PrescriptionItem } from "./types.js";

export type RenderSink = (html: string, state: ViewState) => void;

export class App {
  state: ViewState = initialState();

  constructor(
    private client: Client,
    private sink: RenderSink = () => {},
  ) {}

  start(): void {
    this.paint();
  }

  private paint(): void {
    this.sink(renderApp(this.state, this.client.hasToken()), this.state);
  }

  private go(page: Page): void {
    this.state = goto(this.state, page, this.client.hasToken());
    this.paint();
  }

  logout(): void {
    this.client.clearToken();
    this.state = initialState();
    this.paint();
  }

  async doLogin(username: string, password: string): Promise<void> {
    try {
      const out = await this.client.login(username, password);
      const landing = landingPage(out.role);
      if (landing === null) {
        // the web console serves the two clinical roles only
        this.client.clearToken();
        this.state.loginError = "This console serves prescribers and dispensers.";
        this.paint();
        return;
      }
      this.state = { ...initialState(), role: out.role, username };
      if (landing === "prescribe") await this.loadPrescribeData("");
      this.go(landing);
    } catch (err) {
      this.state.loginError = err instanceof ApiError ? err.message : String(err);
      this.paint();
    }
  }

  // prescriber side ------------------------------------------------------

  async loadPrescribeData(query: string): Promise<void> {
    this.state.drugs = await this.client.listDrugs();
    this.state.patients = await this.client.searchPatients(query);
    this.state.patientQuery = query;
  }

  async searchPatients(query: string): Promise<void> {
    try {
      this.state.patients = await this.client.searchPatients(query);
      this.state.patientQuery = query;
    } catch (err) {
      this.state.prescribeError = err instanceof ApiError ? err.message : String(err);
    }
    this.paint();
  }

  addItemRow(): void {
    this.state.itemRows += 1;
    this.paint();
  }

  async submitPrescription(
    patientId: number,
    items: PrescriptionItem[],
    advice: string,
  ): Promise<void> {
    if (items.length === 0) {
      this.state.prescribeError = "Add at least one drug.";
      this.paint();
      return;
    }
    try {
      const out = await this.client.createPrescription(patientId, items, advice);
      const patient = this.state.patients.find((p) => p.id === patientId);
      const patientName = patient ? patient.name : `patient #${patientId}`;
      this.state.prescribeError = null;
      this.state.confirmSummary = {
        recordId: out.record_id,
        patient: patientName,
        itemCount: items.length,
      };
      // login only hands out token and role, so the card carries what the
      // client already knows: the prescriber's own username and today
      this.state.card = {
        doctor: this.state.username ?? "",
        patient: patientName,
        code: out.code,
        date: new Date().toISOString().slice(0, 10),
      };
      this.go("confirm");
    } catch (err) {
      // conflict messages name the offending drugs, show them as-is
      this.state.prescribeError = err instanceof ApiError ? err.message : String(err);
      this.paint();
    }
  }

  showCard(): void {
    this.go("code-card");
  }

  /** Leaving the card wipes the code; a fresh prescribe form comes up. */
  dismissCard(): void {
    this.state.itemRows = 1;
    this.state.confirmSummary = null;
    this.go("prescribe");
  }

  // dispenser side -------------------------------------------------------

  async searchHistoryPatients(query: string): Promise<void> {
    this.state.historyPatients = await this.client.searchPatients(query);
    this.paint();
  }

  async loadHistory(patientId: number): Promise<void> {
    const patient = this.state.historyPatients.find((p) => p.id === patientId);
    this.state.historyPatient =
      patient ?? { id: patientId, name: `patient #${patientId}`, date_of_birth: "", allergies: [] };
    this.state.historyRows = await this.client.history(patientId);
    this.paint();
  }

  async openRecord(recordId: number): Promise<void> {
    this.state.openRecordId = recordId;
    this.state.dispenseError = null;
    this.state.dispenseTerminal = null;
    this.state.prescription = null;
    this.state.stegoPng = await this.client.stegoPng(recordId);
    this.go("dispense-entry");
  }

  async submitCode(code: string): Promise<void> {
    const recordId = this.state.openRecordId;
    if (recordId === null) return;
    try {
      const out = await this.client.dispense(recordId, code);
      if (this.state.drugs.length === 0) {
        // need the catalog to show drug names instead of bare ids
        this.state.drugs = await this.client.listDrugs();
      }
      this.state.prescription = out.prescription;
      this.state.dispensedAt = out.dispensed_at;
      this.state.dispenseError = null;
      this.go("prescription-view");
    } catch (err) {
      if (err instanceof ApiError && err.code === "ALREADY_DISPENSED") {
        this.state.dispenseTerminal = err.message;
      } else if (err instanceof ApiError) {
        this.state.dispenseError = err.message; // BAD_CODE: inline retry
      } else {
        this.state.dispenseError = String(err);
      }
      this.paint();
    }
  }

  ack(): void {
    this.go("dispense-confirm");
  }

  async backToHistory(): Promise<void> {
    this.state.stegoPng = null;
    this.state.prescription = null;
    this.state.openRecordId = null;
    if (this.state.historyPatient) {
      this.state.historyRows = await this.client.history(this.state.historyPatient.id);
    }
    this.go("history");
  }
}
