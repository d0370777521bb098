import { beforeEach, describe, expect, it } from 'vitest'

import { ApiClient, type FetchLike } from './api.js'
import { App, type AppElements } from './app.js'
import type { SchemaEntry } from './types.js'

const SCHEMA: SchemaEntry[] = [
    { name: 'HighBP', kind: 'binary', observed_min: 0, observed_max: 1 },
    { name: 'GenHlth', kind: 'ordinal', observed_min: 1, observed_max: 5 },
    { name: 'BMI', kind: 'continuous', observed_min: 12, observed_max: 98 },
]

const IMPORTANCE = [
    { name: 'GenHlth', score: 0.21 },
    { name: 'BMI', score: 0.13 },
    { name: 'HighBP', score: 0.02 },
]

function elements(): AppElements {
    document.body.innerHTML = `
      <div id="banner"></div><div id="form"></div><div id="risk"></div>
      <div id="importance"></div><button id="submit"></button>`
    return {
        banner: document.getElementById('banner') as HTMLElement,
        form: document.getElementById('form') as HTMLElement,
        risk: document.getElementById('risk') as HTMLElement,
        importance: document.getElementById('importance') as HTMLElement,
        submit: document.getElementById('submit') as HTMLButtonElement,
    }
}

interface ServiceStub {
    fetch: FetchLike
    predictCalls: Array<Record<string, number>>
}

function serviceStub(probability = 0.8375849201): ServiceStub {
    const predictCalls: Array<Record<string, number>> = []
    const fetchFn: FetchLike = async (input, init) => {
        const respond = (body: unknown, status = 200) =>
            new Response(JSON.stringify(body), { status })
        if (input.endsWith('/schema')) return respond(SCHEMA)
        if (input.endsWith('/importance')) return respond(IMPORTANCE)
        if (input.endsWith('/predict')) {
            const body = JSON.parse(String(init?.body)) as Record<string, number>
            predictCalls.push(body)
            return respond({
                label: probability >= 0.5 ? 'diabetic' : 'non-diabetic',
                probability,
                confidence: Math.max(probability, 1 - probability),
                warnings: [],
            })
        }
        return respond({ detail: 'not found' }, 404)
    }
    return { fetch: fetchFn, predictCalls }
}

function fillForm(el: AppElements): void {
    const highbpYes = el.form.querySelector<HTMLButtonElement>(
        '[data-field="HighBP"] button:nth-of-type(2)')
    highbpYes?.click()
    for (const name of ['GenHlth', 'BMI']) {
        const input = el.form.querySelector<HTMLInputElement>(`[data-field="${name}"] input`)
        input!.value = name === 'GenHlth' ? '4' : '31.5'
        input!.dispatchEvent(new Event('input'))
    }
}

describe('App', () => {
    let el: AppElements

    beforeEach(() => {
        el = elements()
    })

    it('renders one control per served feature', async () => {
        const stub = serviceStub()
        const app = new App(new ApiClient('http://svc', stub.fetch), el)
        await app.start()
        expect(el.form.querySelectorAll('.field')).toHaveLength(SCHEMA.length)
        expect(el.form.querySelectorAll('[data-field="HighBP"] .toggle')).toHaveLength(1)
    })

    it('disables submit until the form is complete', async () => {
        const stub = serviceStub()
        const app = new App(new ApiClient('http://svc', stub.fetch), el)
        await app.start()
        expect(el.submit.disabled).toBe(true)
        fillForm(el)
        expect(el.submit.disabled).toBe(false)
    })

    it('displays the service probability and confidence verbatim', async () => {
        const stub = serviceStub(0.8375849201)
        const app = new App(new ApiClient('http://svc', stub.fetch), el)
        await app.start()
        fillForm(el)
        await app.submit()
        expect(el.risk.querySelector('.risk-probability')?.textContent)
            .toBe('probability: 0.8375849201')
        expect(el.risk.querySelector('.risk-confidence')?.textContent)
            .toBe('confidence: 0.8375849201')
        expect(el.risk.querySelector('.risk-label')?.textContent).toBe('diabetic')
        expect(stub.predictCalls[0]).toEqual({ HighBP: 1, GenHlth: 4, BMI: 31.5 })
    })

    it('appends a what-if history entry when a factor changes and resubmits', async () => {
        const stub = serviceStub()
        const app = new App(new ApiClient('http://svc', stub.fetch), el)
        await app.start()
        fillForm(el)
        await app.submit()
        expect(app.riskState.history).toHaveLength(1)

        const bmi = el.form.querySelector<HTMLInputElement>('[data-field="BMI"] input')
        bmi!.value = '40'
        bmi!.dispatchEvent(new Event('input'))
        await app.submit()
        expect(app.riskState.history).toHaveLength(2)
        expect(el.risk.querySelectorAll('.history li')).toHaveLength(2)
        expect(app.riskState.history[0]!.inputs.BMI).toBe(31.5)
        expect(app.riskState.history[1]!.inputs.BMI).toBe(40)
    })

    it('renders importance bars in service order', async () => {
        const stub = serviceStub()
        const app = new App(new ApiClient('http://svc', stub.fetch), el)
        await app.start()
        const rows = [...el.importance.querySelectorAll<HTMLElement>('.bar-row')]
        expect(rows.map((r) => r.dataset.feature)).toEqual(['GenHlth', 'BMI', 'HighBP'])
    })

    it('shows retry banners where the failed content would render', async () => {
        const failing: FetchLike = async () => new Response('down', { status: 503 })
        const app = new App(new ApiClient('http://svc', failing), el)
        await app.start()
        expect(el.form.textContent).toContain('could not load the feature schema')
        expect(el.form.querySelector('button')?.textContent).toBe('retry')
        expect(el.importance.textContent).toContain('importance unavailable')
    })

    it('keeps form state and shows a toast on prediction failure', async () => {
        let healthy = false
        const stub = serviceStub()
        const flaky: FetchLike = async (input, init) => {
            if (input.endsWith('/predict') && !healthy) {
                return new Response(JSON.stringify({ detail: 'model not loaded' }), { status: 503 })
            }
            return stub.fetch(input, init)
        }
        const app = new App(new ApiClient('http://svc', flaky), el)
        await app.start()
        fillForm(el)
        await app.submit()
        expect(el.banner.querySelector('.toast')?.textContent).toContain('model not loaded')
        expect(el.submit.disabled).toBe(false) // form state preserved
        healthy = true
        await app.submit()
        expect(app.riskState.history).toHaveLength(1)
    })

    it('highlights the named field on a validation error', async () => {
        const stub = serviceStub()
        const rejecting: FetchLike = async (input, init) => {
            if (input.endsWith('/predict')) {
                return new Response(JSON.stringify({ detail: 'missing feature: BMI' }),
                    { status: 422 })
            }
            return stub.fetch(input, init)
        }
        const app = new App(new ApiClient('http://svc', rejecting), el)
        await app.start()
        fillForm(el)
        await app.submit()
        expect(el.form.querySelector('[data-field="BMI"]')?.classList.contains('invalid'))
            .toBe(true)
        expect(el.form.querySelector('[data-field="GenHlth"]')?.classList.contains('invalid'))
            .toBe(false)
    })
})
