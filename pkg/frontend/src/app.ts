import { ApiClient, ApiError, LatestWins, isAbort } from './api.js'
import { buildFormModel, formValues, isComplete, setValue, type FormModel } from './form.js'
import { renderBanner, renderForm, renderImportance, renderRisk, renderToast } from './render.js'
import { emptyRiskState, recordResult, type RiskState } from './state.js'

export interface AppElements {
    form: HTMLElement
    risk: HTMLElement
    importance: HTMLElement
    banner: HTMLElement
    submit: HTMLButtonElement
}

/**
 * Wires the schema-driven form, prediction panel, and importance view.
 * Every displayed number comes verbatim from the service; nothing is
 * computed locally.
 */
export class App {
    private model: FormModel | null = null
    private state: RiskState = emptyRiskState()
    private readonly gate = new LatestWins()

    constructor(
        private readonly client: ApiClient,
        private readonly el: AppElements,
    ) {
        this.el.submit.addEventListener('click', () => {
            void this.submit()
        })
        this.el.submit.disabled = true
    }

    async start(): Promise<void> {
        await Promise.all([this.loadSchema(), this.loadImportance()])
    }

    private async loadSchema(): Promise<void> {
        try {
            const schema = await this.client.schema()
            this.model = buildFormModel(schema)
            this.redrawForm()
            renderRisk(this.el.risk, this.state)
        } catch (error) {
            this.model = null
            renderBanner(this.el.form, `could not load the feature schema: ${message(error)}`,
                () => void this.loadSchema())
        }
    }

    private async loadImportance(): Promise<void> {
        try {
            renderImportance(this.el.importance, await this.client.importance())
        } catch (error) {
            renderBanner(this.el.importance, `importance unavailable: ${message(error)}`,
                () => void this.loadImportance())
        }
    }

    private redrawForm(): void {
        if (!this.model) return
        renderForm(this.el.form, this.model, (name, value) => this.onChange(name, value))
        this.el.submit.disabled = !isComplete(this.model)
    }

    private onChange(name: string, value: number | null): void {
        if (!this.model) return
        this.model = setValue(this.model, name, value)
        this.redrawForm()
    }

    async submit(): Promise<void> {
        if (!this.model || !isComplete(this.model)) return
        const inputs = formValues(this.model)
        const signal = this.gate.begin()
        try {
            const response = await this.client.predict(inputs, signal)
            this.state = recordResult(this.state, inputs, response)
            renderRisk(this.el.risk, this.state)
        } catch (error) {
            if (isAbort(error)) return // superseded by a newer submission
            if (error instanceof ApiError && error.status === 422) {
                this.highlightField(error.message)
            }
            renderToast(this.el.banner, `prediction failed: ${message(error)}`)
        }
    }

    private highlightField(detail: string): void {
        // service details read "missing feature: X" / "feature X must be numeric"
        for (const control of this.model?.controls ?? []) {
            const row = this.el.form.querySelector<HTMLElement>(`[data-field="${control.name}"]`)
            row?.classList.toggle('invalid', detail.includes(control.name))
        }
    }

    get riskState(): RiskState {
        return this.state
    }
}

function message(error: unknown): string {
    return error instanceof Error ? error.message : String(error)
}
