import type { FormModel } from './form.js'
import type { RiskState } from './state.js'
import type { ImportanceEntry } from './types.js'

function clear(root: HTMLElement): void {
    while (root.firstChild) root.removeChild(root.firstChild)
}

function labelled(name: string, input: HTMLElement): HTMLElement {
    const row = document.createElement('div')
    row.className = 'field'
    row.dataset.field = name
    const label = document.createElement('label')
    label.textContent = name
    row.append(label, input)
    return row
}

export type ChangeHandler = (name: string, value: number | null) => void

/** One control per feature: yes/no toggle, integer stepper, or number input. */
export function renderForm(root: HTMLElement, model: FormModel, onChange: ChangeHandler): void {
    clear(root)
    for (const control of model.controls) {
        if (control.control === 'toggle') {
            const group = document.createElement('div')
            group.className = 'toggle'
            for (const option of [0, 1]) {
                const button = document.createElement('button')
                button.type = 'button'
                button.textContent = option === 1 ? 'yes' : 'no'
                button.className = control.value === option ? 'on' : ''
                button.addEventListener('click', () => onChange(control.name, option))
                group.append(button)
            }
            root.append(labelled(control.name, group))
        } else {
            const input = document.createElement('input')
            input.type = 'number'
            input.min = String(control.min)
            input.max = String(control.max)
            input.step = control.control === 'stepper' ? '1' : 'any'
            input.placeholder = `${control.min}..${control.max}`
            if (control.value !== null) input.value = String(control.value)
            input.addEventListener('input', () => {
                const parsed = input.value === '' ? null : Number(input.value)
                onChange(control.name, parsed !== null && Number.isFinite(parsed) ? parsed : null)
            })
            root.append(labelled(control.name, input))
        }
    }
}

/** Current risk plus the what-if history; all numbers shown verbatim. */
export function renderRisk(root: HTMLElement, state: RiskState): void {
    clear(root)
    if (state.current === null) {
        const hint = document.createElement('p')
        hint.className = 'hint'
        hint.textContent = 'Fill in every factor and submit to see the risk estimate.'
        root.append(hint)
        return
    }
    const panel = document.createElement('div')
    panel.className = `risk ${state.current.label === 'diabetic' ? 'positive' : 'negative'}`
    const label = document.createElement('h2')
    label.className = 'risk-label'
    label.textContent = state.current.label
    const probability = document.createElement('p')
    probability.className = 'risk-probability'
    probability.textContent = `probability: ${state.current.probability}`
    const confidence = document.createElement('p')
    confidence.className = 'risk-confidence'
    confidence.textContent = `confidence: ${state.current.confidence}`
    panel.append(label, probability, confidence)
    for (const warning of state.current.warnings) {
        const note = document.createElement('p')
        note.className = 'warning'
        note.textContent = warning
        panel.append(note)
    }
    root.append(panel)

    const history = document.createElement('ol')
    history.className = 'history'
    for (const snapshot of state.history) {
        const item = document.createElement('li')
        item.textContent = `${snapshot.label} (p=${snapshot.probability})`
        history.append(item)
    }
    root.append(history)
}

/** Importance bars, exactly in the order the service returned them. */
export function renderImportance(root: HTMLElement, entries: ImportanceEntry[]): void {
    clear(root)
    const top = Math.max(...entries.map((e) => e.score), 0)
    for (const entry of entries) {
        const row = document.createElement('div')
        row.className = 'bar-row'
        row.dataset.feature = entry.name
        const label = document.createElement('span')
        label.className = 'bar-label'
        label.textContent = entry.name
        const bar = document.createElement('div')
        bar.className = 'bar'
        bar.style.width = top > 0 ? `${(100 * entry.score) / top}%` : '0%'
        bar.title = String(entry.score)
        row.append(label, bar)
        root.append(row)
    }
}

export function renderBanner(root: HTMLElement, message: string, onRetry?: () => void): void {
    clear(root)
    const banner = document.createElement('div')
    banner.className = 'banner'
    const text = document.createElement('span')
    text.textContent = message
    banner.append(text)
    if (onRetry) {
        const retry = document.createElement('button')
        retry.type = 'button'
        retry.textContent = 'retry'
        retry.addEventListener('click', onRetry)
        banner.append(retry)
    }
    root.append(banner)
}

/** Non-blocking error display; the form keeps its state. */
export function renderToast(root: HTMLElement, message: string): void {
    const toast = document.createElement('div')
    toast.className = 'toast'
    toast.textContent = message
    root.append(toast)
    setTimeout(() => toast.remove(), 6000)
}
