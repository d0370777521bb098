import { describe, expect, it } from 'vitest'

import { HISTORY_LIMIT, emptyRiskState, recordResult } from './state.js'
import type { PredictResponse } from './types.js'

const RESPONSE: PredictResponse = {
    label: 'diabetic',
    probability: 0.8375849201,
    confidence: 0.8375849201,
    warnings: [],
}

describe('what-if history', () => {
    it('appends one entry per recorded result', () => {
        let state = emptyRiskState()
        state = recordResult(state, { BMI: 30 }, RESPONSE)
        expect(state.history).toHaveLength(1)
        state = recordResult(state, { BMI: 31 }, { ...RESPONSE, probability: 0.9 })
        expect(state.history).toHaveLength(2)
        expect(state.current?.probability).toBe(0.9)
    })

    it('snapshots are immutable and detached from their inputs', () => {
        const inputs = { BMI: 30 }
        const state = recordResult(emptyRiskState(), inputs, RESPONSE)
        inputs.BMI = 99 // editing the form afterwards must not rewrite history
        const snapshot = state.history[0]!
        expect(snapshot.inputs.BMI).toBe(30)
        expect(Object.isFrozen(snapshot)).toBe(true)
        expect(Object.isFrozen(snapshot.inputs)).toBe(true)
        expect(() => {
            ;(snapshot as { probability: number }).probability = 0
        }).toThrow()
    })

    it('keeps only the most recent entries', () => {
        let state = emptyRiskState()
        for (let i = 0; i < HISTORY_LIMIT + 5; i++) {
            state = recordResult(state, { BMI: i }, RESPONSE)
        }
        expect(state.history).toHaveLength(HISTORY_LIMIT)
        expect(state.history[0]!.inputs.BMI).toBe(5)
    })

    it('stores response numbers verbatim', () => {
        const state = recordResult(emptyRiskState(), { BMI: 30 }, RESPONSE)
        expect(state.current?.probability).toBe(0.8375849201)
        expect(state.current?.confidence).toBe(0.8375849201)
    })
})
