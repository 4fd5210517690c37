// Response payload shapes for the monitoring service API (v1).
// These mirror the server's published JSON Schemas field for field; every
// number the dashboard displays comes out of one of these structures.

export type Speaker = "assistant" | "patient";
export type TurnTag = "normal" | "abnormal" | "red_flag";
export type AlertSeverity = "warning" | "critical";
export type Resolution = "raw" | "minute" | "hour" | "day";
export type Metric = "heart_rate" | "respiration" | "spo2" | "skin_temp";

export interface HealthPayload {
  status: "ok" | "degraded";
  components: Record<string, string>;
  poll_seconds: number;
}

export interface PatientPayload {
  patient_id: string;
  name: string;
  age: number;
  sex: string;
  cancer_type: string;
  cancer_stage: string;
  treatment_type: string;
  treatment_start: string;
  screened_risk_factors: string[];
}

export interface PatientListPayload {
  patients: PatientPayload[];
}

export interface SamplePoint {
  t: number;
  v: number;
}

export interface SeriesBucket {
  bucket_start: number;
  count: number;
  mean: number;
  min: number;
  max: number;
}

// resolution "raw" fills samples, everything else fills buckets
export interface VitalsPayload {
  patient_id: string;
  metric: string;
  resolution: Resolution;
  samples?: SamplePoint[] | null;
  buckets?: SeriesBucket[] | null;
}

export interface AttributionPayload {
  group_id: string;
  label: string;
  phi: number;
  share: number;
}

export interface AssessmentPayload {
  patient_id: string;
  t: number;
  horizon_days: number;
  score: number;
  linear_score: number;
  attributions: AttributionPayload[];
  narrative: string;
  tier: string;
  source: string;
}

export interface TrendPoint {
  t: number;
  score: number;
}

export interface RiskPayload {
  patient_id: string;
  model_state: "ok" | "unavailable";
  latest: AssessmentPayload | null;
  trend: TrendPoint[];
}

export interface ExtractedSymptomPayload {
  symptom: string;
  negated: boolean;
  severity_words: string[];
}

export interface TurnPayload {
  turn_id: string;
  session_id: string;
  patient_id: string;
  speaker: Speaker;
  t: number;
  tag: TurnTag;
  text: string;
  extracted: ExtractedSymptomPayload[];
}

export interface ConversationsPayload {
  patient_id: string;
  date: string | null;
  turns: TurnPayload[];
}

export interface MetricStatsPayload {
  count: number;
  mean: number;
  min: number;
  max: number;
  deviation_flag: boolean;
}

export interface SymptomMentionPayload {
  symptom: string;
  t: number;
  tag: string;
}

export interface SummaryPayload {
  patient_id: string;
  date: string;
  metrics: Record<string, MetricStatsPayload>;
  symptoms: SymptomMentionPayload[];
  alert_count: number;
  note_hooks: string[];
  rendered_text: string;
}

export interface AlertPayload {
  alert_id: string;
  patient_id: string;
  source: string;
  severity: AlertSeverity;
  t_raised: number;
  message: string;
  z_peak: number | null;
}

export interface AlertsPayload {
  patient_id: string;
  alerts: AlertPayload[];
}

export interface NotePayload {
  note_id: string;
  patient_id: string;
  author: string;
  t: number;
  text: string;
}
