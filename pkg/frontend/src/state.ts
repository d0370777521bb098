import type { PredictResponse } from './types.js'

export const HISTORY_LIMIT = 20

/** Frozen record of one what-if submission. */
export interface RiskSnapshot {
    readonly inputs: Readonly<Record<string, number>>
    readonly label: string
    readonly probability: number
    readonly confidence: number
    readonly warnings: readonly string[]
}

export interface RiskState {
    current: RiskSnapshot | null
    history: readonly RiskSnapshot[]
}

export function emptyRiskState(): RiskState {
    return { current: null, history: [] }
}

/**
 * Append a result to the what-if history. Snapshots are deep-frozen copies,
 * so later form edits can never rewrite them.
 */
export function recordResult(
    state: RiskState,
    inputs: Record<string, number>,
    response: PredictResponse,
): RiskState {
    const snapshot: RiskSnapshot = Object.freeze({
        inputs: Object.freeze({ ...inputs }),
        label: response.label,
        probability: response.probability,
        confidence: response.confidence,
        warnings: Object.freeze([...response.warnings]),
    })
    const history = [...state.history, snapshot].slice(-HISTORY_LIMIT)
    return { current: snapshot, history: Object.freeze(history) }
}
