// Panel A: who the patient is. Demographics, diagnosis, treatment, and
// any screened risk-factor codes attached during model training.

import type { PatientPayload } from "../types.js";
import { escapeHtml, humanizeToken } from "../format.js";

export interface PatientCardVM {
  patientId: string;
  name: string;
  demographics: string;
  cancer: string;
  treatment: string;
  riskFactors: string[];
}

export function patientCardViewModel(p: PatientPayload): PatientCardVM {
  return {
    patientId: p.patient_id,
    name: p.name,
    demographics: `Age ${p.age}, ${p.sex}`,
    cancer: `${p.cancer_type}, stage ${p.cancer_stage}`,
    treatment: `${humanizeToken(p.treatment_type)} since ${p.treatment_start}`,
    riskFactors: p.screened_risk_factors,
  };
}

export function renderPatientCard(vm: PatientCardVM): string {
  const chips = vm.riskFactors
    .map((code) => `<span class="chip">${escapeHtml(code)}</span>`)
    .join("");
  const factors = vm.riskFactors.length
    ? `<div class="patient-card__row"><span class="label">Screened factors</span>${chips}</div>`
    : "";
  return [
    `<div class="patient-card" data-patient="${escapeHtml(vm.patientId)}">`,
    `<p class="patient-card__name">${escapeHtml(vm.name)}</p>`,
    `<div class="patient-card__row"><span class="label">Demographics</span>${escapeHtml(vm.demographics)}</div>`,
    `<div class="patient-card__row"><span class="label">Diagnosis</span>${escapeHtml(vm.cancer)}</div>`,
    `<div class="patient-card__row"><span class="label">Treatment</span>${escapeHtml(vm.treatment)}</div>`,
    factors,
    `</div>`,
  ].join("");
}
