// Shapes of the JSON the service sends and receives.

export type Role = "administrator" | "prescriber" | "dispenser";

export interface LoginResponse {
  token: string;
  role: Role;
}

export interface Drug {
  id: number;
  name: string;
  interacts_with: number[];
}

export interface Patient {
  id: number;
  name: string;
  date_of_birth: string;
  allergies: number[];
}

export interface HistoryRow {
  record_id: number;
  issue_date: string;
  status: "pending" | "dispensed";
  dispensed_at: string | null;
}

export interface PrescriptionItem {
  drug_id: number;
  dosage: string;
  quantity: number;
}

export interface Prescription {
  patient_id: number;
  prescriber_id: number;
  issue_date: string;
  items: PrescriptionItem[];
  advice: string;
}

export interface CreateResult {
  record_id: number;
  code: string;
}

export interface DispenseResult {
  prescription: Prescription;
  dispensed_at: string;
}
