/** Reliability panel model: per-operator Beta parameter history.
 *
 * Keeps the last 10 distinct (alpha, beta) updates per operator and assigns
 * each a fade weight, oldest faintest, newest fully opaque, so the drift of
 * an operator's reliability density is visible as a trail of curves.
 */

export interface BetaParams {
  alpha: number;
  beta: number;
}

export interface FadedCurve extends BetaParams {
  /** (0, 1]; 1 is the most recent update. */
  fade: number;
}

export const HISTORY_LIMIT = 10;

export class ReliabilityHistory {
  private readonly perOperator = new Map<string, BetaParams[]>();

  /** Record an update; consecutive duplicates are ignored. */
  push(operatorId: string, alpha: number, beta: number): void {
    let entries = this.perOperator.get(operatorId);
    if (entries === undefined) {
      entries = [];
      this.perOperator.set(operatorId, entries);
    }
    const last = entries[entries.length - 1];
    if (last !== undefined && last.alpha === alpha && last.beta === beta) {
      return;
    }
    entries.push({ alpha, beta });
    if (entries.length > HISTORY_LIMIT) {
      entries.splice(0, entries.length - HISTORY_LIMIT);
    }
  }

  curves(operatorId: string): FadedCurve[] {
    const entries = this.perOperator.get(operatorId) ?? [];
    const n = entries.length;
    return entries.map((e, i) => ({ ...e, fade: (i + 1) / n }));
  }

  operators(): string[] {
    return [...this.perOperator.keys()].sort();
  }
}
