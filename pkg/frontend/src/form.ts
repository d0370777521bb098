import type { SchemaEntry } from './types.js'

export type ControlType = 'toggle' | 'stepper' | 'number'

export interface FormControl {
    name: string
    kind: SchemaEntry['kind']
    control: ControlType
    min: number
    max: number
    value: number | null
}

export interface FormModel {
    controls: FormControl[]
    dirty: boolean
}

const CONTROL_FOR_KIND: Record<SchemaEntry['kind'], ControlType> = {
    binary: 'toggle',
    ordinal: 'stepper',
    continuous: 'number',
}

/** One control per served feature, typed by schema kind; values start empty. */
export function buildFormModel(schema: SchemaEntry[]): FormModel {
    if (schema.length === 0) {
        throw new Error('service returned an empty feature schema')
    }
    return {
        controls: schema.map((entry) => ({
            name: entry.name,
            kind: entry.kind,
            control: CONTROL_FOR_KIND[entry.kind],
            min: entry.observed_min,
            max: entry.observed_max,
            value: null,
        })),
        dirty: false,
    }
}

export function setValue(model: FormModel, name: string, value: number | null): FormModel {
    if (!model.controls.some((c) => c.name === name)) {
        throw new Error(`unknown form field: ${name}`)
    }
    return {
        controls: model.controls.map((c) => (c.name === name ? { ...c, value } : c)),
        dirty: true,
    }
}

export function isComplete(model: FormModel): boolean {
    return model.controls.every((c) => c.value !== null && Number.isFinite(c.value))
}

/** Feature map for POST /predict; only valid once the form is complete. */
export function formValues(model: FormModel): Record<string, number> {
    if (!isComplete(model)) {
        throw new Error('form is incomplete')
    }
    const values: Record<string, number> = {}
    for (const control of model.controls) {
        values[control.name] = control.value as number
    }
    return values
}
