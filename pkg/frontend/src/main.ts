// Browser entry point: mounts the app on #app and translates DOM events
// into controller calls. Everything interesting lives in app.ts.

import { App } from "./app.js";
import { Client } from "./api.js";
import type { PrescriptionItem } from "./types.js";

function collectItems(form: HTMLFormElement, rows: number): PrescriptionItem[] {
  const items: PrescriptionItem[] = [];
  const data = new FormData(form);
  for (let i = 0; i < rows; i++) {
    const drug = String(data.get(`drug-${i}`) ?? "");
    const dosage = String(data.get(`dosage-${i}`) ?? "").trim();
    const qty = parseInt(String(data.get(`qty-${i}`) ?? ""), 10);
    if (drug === "") continue;
    items.push({ drug_id: parseInt(drug, 10), dosage, quantity: qty || 1 });
  }
  return items;
}

function mount(root: HTMLElement): void {
  const client = new Client(""); // same origin, the dev server proxies the API
  const app = new App(client, (html, state) => {
    root.innerHTML = html;
    const img = root.querySelector<HTMLImageElement>("img[data-stego]");
    if (img && state.stegoPng) {
      const url = URL.createObjectURL(new Blob([state.stegoPng as BlobPart], { type: "image/png" }));
      img.src = url;
      img.onload = () => URL.revokeObjectURL(url);
    }
  });

  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    const action = form.dataset.action;
    if (!action) return;
    event.preventDefault();
    const data = new FormData(form);
    const field = (name: string) => String(data.get(name) ?? "");
    if (action === "login") void app.doLogin(field("username"), field("password"));
    else if (action === "patient-search") void app.searchPatients(field("q"));
    else if (action === "history-search") void app.searchHistoryPatients(field("q"));
    else if (action === "dispense") void app.submitCode(field("code").trim());
    else if (action === "prescribe") {
      void app.submitPrescription(
        parseInt(field("patient"), 10),
        collectItems(form, app.state.itemRows),
        field("advice").trim(),
      );
    }
  });

  root.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!button || button.tagName === "FORM") return;
    const action = button.dataset.action;
    if (action === "logout") app.logout();
    else if (action === "add-item") app.addItemRow();
    else if (action === "show-card") app.showCard();
    else if (action === "print") window.print();
    else if (action === "done") app.dismissCard();
    else if (action === "ack") app.ack();
    else if (action === "back-to-history") void app.backToHistory();
    else if (action === "pick-patient")
      void app.loadHistory(parseInt(button.dataset.patient ?? "0", 10));
    else if (action === "open-record")
      void app.openRecord(parseInt(button.dataset.record ?? "0", 10));
  });

  app.start();
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) mount(rootElement);
