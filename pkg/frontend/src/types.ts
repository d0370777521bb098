export interface SchemaEntry {
    name: string
    kind: 'binary' | 'ordinal' | 'continuous'
    observed_min: number
    observed_max: number
}

export interface PredictResponse {
    label: 'diabetic' | 'non-diabetic'
    probability: number
    confidence: number
    warnings: string[]
}

export interface ImportanceEntry {
    name: string
    score: number
}

export interface HealthResponse {
    status: string
    model_version: string | null
    uptime_seconds: number
}
