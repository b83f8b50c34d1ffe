/**
 * Wire types shared with the HTTP service.
 */

export type ModelName = "gamma" | "weibull" | "bernoulli";
export type MethodName = "bvm" | "laplace" | "hybrid";
export type ComparisonName = "difference" | "ratio" | "proportion_difference";

export interface PriorGamma {
  family: "gamma";
  shape: number;
  rate: number;
}

export interface PriorBeta {
  family: "beta";
  a: number;
  b: number;
}

export type PriorMarginal = PriorGamma | PriorBeta;

export type Analysis =
  | { type: "posterior_prob"; gamma: number }
  | { type: "bayes_factor"; K: number }
  | { type: "credible_interval"; alpha: number };

export interface DesignSpec {
  model: ModelName;
  design_values: { group1: number[]; group2: number[] };
  priors: { group1: PriorMarginal[]; group2: PriorMarginal[] };
  characteristic: { kind: "tail_prob" | "identity"; threshold?: number };
  comparison: ComparisonName;
  interval: [number | null, number | null];
  analysis: Analysis;
  target_power: number;
  method?: MethodName;
  m?: number;
  q?: number;
  seed?: number;
  n_max?: number;
  label?: string;
}

export interface PowerCurveResult {
  n0: number;
  n_star: number;
  recommendation: number;
  reinit_count: number;
  gamma_eff: number | null;
  warnings: string[];
  curve: [number, number][];
  roots: number[];
}

export interface OracleRow {
  n: number;
  reps: number;
  power_hat: number;
  ci95: [number, number];
  posterior_method: string;
}

export type SessionStatus = "queued" | "running" | "done" | "failed";

export interface Session {
  id: string;
  label: string;
  spec: DesignSpec;
  status: SessionStatus;
  result: PowerCurveResult | null;
  oracle: OracleRow[] | null;
  error: string | null;
  created_at: number;
  finished_at: number | null;
}

/** One scenario the practitioner is exploring. */
export interface ScenarioCard {
  localId: number;
  spec: DesignSpec;
  sessionId: string | null;
  status: SessionStatus | "draft" | "stale";
  result: PowerCurveResult | null;
  oracle: OracleRow[] | null;
  visible: boolean;
  error: string | null;
}
